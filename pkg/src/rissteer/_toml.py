import re
import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ScenarioParseError

_POS = re.compile(r"at line (\d+), column (\d+)")


def load_toml(path) -> dict:
    """Parse a TOML file, converting failures into ScenarioParseError."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        raise ScenarioParseError("file is empty", path=path, line=1, column=1)
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = _POS.search(str(exc))
        line, col = (int(m.group(1)), int(m.group(2))) if m else (None, None)
        raise ScenarioParseError(str(exc), path=path, line=line, column=col) from None
