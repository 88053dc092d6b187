"""Reading and writing occupancy-grid map files.

Two formats are supported:

* plain text: a ``"width height"`` header line followed by ``height`` rows of
  ``width`` characters, ``.`` for free and ``#`` for obstacle;
* binary PGM (``P5``): gray values below half of ``maxval + 1`` are obstacles.
"""

from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ..interfaces import MapFormatError
from .grid import OccupancyGrid

_PGM_MAGIC = b"P5"


def load_map(path: Path) -> OccupancyGrid:
    """
    Load a map from a text grid or a binary PGM file.

    Args:
        path: Map file path

    Returns:
        Parsed occupancy grid

    Raises:
        MapFormatError: If the header, rows or magic number are invalid
        OSError: If the file cannot be read
    """
    data = Path(path).read_bytes()
    if data[:1] == b"P" and data[1:2].isdigit():
        if data[:2] != _PGM_MAGIC:
            raise MapFormatError(f"Unsupported magic number {data[:2].decode('ascii')!r}", offset=0)
        return parse_pgm(data)
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as e:
        raise MapFormatError("Text map contains non-ASCII bytes", offset=e.start) from e
    return parse_text_map(text)


def parse_text_map(text: str) -> OccupancyGrid:
    """Parse the plain-text grid format."""
    lines = text.splitlines()
    if not lines:
        raise MapFormatError("Empty map file", line=1)

    width, height = _parse_dimensions(lines[0].split(), line=1)
    rows = lines[1:1 + height]
    # trailing blank lines are tolerated, anything else is an error
    extra = [line for line in lines[1 + height:] if line.strip()]
    if len(rows) < height:
        raise MapFormatError(f"Expected {height} rows, found {len(rows)}", line=len(lines) + 1)
    if extra:
        raise MapFormatError(f"Unexpected content after {height} rows", line=2 + height)

    cells = np.zeros((height, width), dtype=bool)
    for index, row in enumerate(rows):
        line_no = index + 2
        if len(row) != width:
            raise MapFormatError(
                f"Row {index + 1} has {len(row)} cells, expected {width}", line=line_no
            )
        for column, ch in enumerate(row):
            if ch == "#":
                cells[index, column] = True
            elif ch != ".":
                raise MapFormatError(
                    f"Row {index + 1} column {column + 1}: unexpected character {ch!r}", line=line_no
                )
    return OccupancyGrid(cells)


def parse_pgm(data: bytes) -> OccupancyGrid:
    """Parse a binary P5 PGM image into an occupancy grid."""
    tokens, offset = _pgm_header(data)
    width, height = _parse_dimensions(tokens[:2], offset=offset)
    try:
        maxval = int(tokens[2])
    except ValueError as e:
        raise MapFormatError(f"Invalid maxval {tokens[2]!r}", offset=offset) from e
    if not 0 < maxval < 256:
        raise MapFormatError(f"Unsupported maxval {maxval}; only 8-bit images are supported", offset=offset)

    expected = width * height
    payload = data[offset:offset + expected]
    if len(payload) < expected:
        raise MapFormatError(
            f"Pixel data truncated: expected {expected} bytes, found {len(payload)}",
            offset=offset + len(payload)
        )
    gray = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    threshold = (maxval + 1) / 2
    return OccupancyGrid(gray < threshold)


def _pgm_header(data: bytes) -> Tuple[List[str], int]:
    """Return the width/height/maxval tokens and the offset of the pixel data."""
    tokens: List[str] = []
    position = len(_PGM_MAGIC)
    while len(tokens) < 3:
        if position >= len(data):
            raise MapFormatError("Truncated PGM header", offset=position)
        byte = data[position:position + 1]
        if byte.isspace():
            position += 1
        elif byte == b"#":
            end = data.find(b"\n", position)
            position = len(data) if end < 0 else end + 1
        else:
            start = position
            while position < len(data) and not data[position:position + 1].isspace():
                position += 1
            tokens.append(data[start:position].decode("ascii", errors="replace"))
    if position >= len(data) or not data[position:position + 1].isspace():
        raise MapFormatError("Missing whitespace before PGM pixel data", offset=position)
    return tokens, position + 1


def _parse_dimensions(
    fields: List[str], line: Optional[int] = None, offset: Optional[int] = None
) -> Tuple[int, int]:
    if len(fields) != 2:
        raise MapFormatError("Header must contain exactly 'width height'", line=line, offset=offset)
    try:
        width, height = int(fields[0]), int(fields[1])
    except ValueError as e:
        raise MapFormatError(f"Non-integer dimensions {fields!r}", line=line, offset=offset) from e
    if width < 1 or height < 1:
        raise MapFormatError(f"Dimensions must be positive, got {width}x{height}", line=line, offset=offset)
    return width, height


def save_map(grid: OccupancyGrid, path: Path) -> Path:
    """
    Write a grid as PGM (``.pgm`` suffix) or in the text format (any other suffix).

    Args:
        grid: Grid to write
        path: Destination file

    Returns:
        The written path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".pgm":
        header = f"P5\n{grid.width} {grid.height}\n255\n".encode("ascii")
        pixels = np.where(grid.array, 0, 255).astype(np.uint8)
        path.write_bytes(header + pixels.tobytes())
    else:
        rows = ["".join("#" if cell else "." for cell in row) for row in grid.array.tolist()]
        path.write_text(f"{grid.width} {grid.height}\n" + "\n".join(rows) + "\n", encoding="ascii")
    return path
