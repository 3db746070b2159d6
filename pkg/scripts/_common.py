"""Shared helper: run a preset (optionally patched) and return its result block."""

import json
import tempfile
from pathlib import Path

from monojac.cli import main
from monojac.presets import get_preset


def run_preset(name: str, out: Path | None = None, patch=None) -> dict:
    doc = get_preset(name)
    if patch is not None:
        patch(doc)
    out = Path(out) if out is not None else Path(tempfile.mkdtemp(prefix="monojac-"))
    out.mkdir(parents=True, exist_ok=True)
    cfg_path = out / "config.json"
    cfg_path.write_text(json.dumps(doc, indent=2))
    main([doc["command"], "--config", str(cfg_path), "--out", str(out)])
    return json.loads((out / "report.json").read_text())["result"]
