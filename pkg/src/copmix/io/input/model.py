"""Loading fitted models from their JSON documents."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from ...core.errors import ValidationError
from ...mixture import QRDensity


def load_model(path: Union[str, Path]) -> QRDensity:
    source = Path(path)
    try:
        document = json.loads(source.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read model {source}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source} is not valid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ValidationError(f"{source} does not hold a model document")
    return QRDensity.from_export_dict(document)
