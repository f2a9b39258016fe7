"""Named experiment presets mirroring the built-in studies."""

from __future__ import annotations

__all__ = ["preset_names", "get_preset"]


def _toy_paper() -> dict:
    return {
        "model": {"preset": "toy"},
        "algorithm": "pt",
        "seed": 0,
        "pt": {
            "tolerances": {"lo": 0.025, "hi": 2.0, "n": 15, "spacing": "log"},
            "temperatures": {"lo": 1.0, "hi": 4.0, "n": 15, "spacing": "log"},
            "iterations": 600000,
            "burn_in": 150000,
            "thinning": 1,
        },
    }


def _toy_quick() -> dict:
    spec = _toy_paper()
    spec["pt"]["iterations"] = 20000
    spec["pt"]["burn_in"] = 5000
    return spec


def _tb_paper() -> dict:
    # The published tolerance ladder is stated only through its endpoints
    # and a log-spacing rule; the generator realizes that rule. Supply an
    # explicit `tolerances` array in a config file to use other levels.
    return {
        "model": {"preset": "tb"},
        "algorithm": "pt",
        "seed": 0,
        "pt": {
            "tolerances": {"lo": 0.01, "hi": 0.1, "n": 7, "spacing": "log"},
            "temperatures": {"lo": 1.0, "hi": 2.0, "n": 7, "spacing": "log"},
            "iterations": 20000,
            "burn_in": 2000,
            "thinning": 1,
        },
    }


def _tb_smoke() -> dict:
    return {
        "model": {"preset": "tb"},
        "algorithm": "pt",
        "seed": 0,
        "pt": {
            "tolerances": {"lo": 0.1, "hi": 1.0, "n": 3, "spacing": "log"},
            "temperatures": {"lo": 1.0, "hi": 2.0, "n": 3, "spacing": "log"},
            "iterations": 20000,
            "burn_in": 2000,
            "thinning": 1,
        },
    }


_PRESETS = {
    "toy": _toy_paper,
    "toy-paper": _toy_paper,
    "toy-quick": _toy_quick,
    "tb": _tb_paper,
    "tb-smoke": _tb_smoke,
}


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def get_preset(name: str) -> dict:
    try:
        return _PRESETS[name]()
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from None
