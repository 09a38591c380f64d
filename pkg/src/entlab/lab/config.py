"""Flat ``key = value`` experiment configuration files.

One experiment per file. Blank lines and ``#`` comments are ignored. The
reserved keys are ``experiment``, ``seed``, ``n_samples`` and
``output_path``; every other key is an experiment parameter.
"""

from dataclasses import dataclass, field

RESERVED = ("experiment", "seed", "n_samples", "output_path")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    seed: int = None
    n_samples: int = None
    output_path: str = "."
    text: str = ""  # the file as read, echoed into result metadata


def parse_lines(text):
    """Return (pairs, errors); pairs keep file order."""
    pairs, errors, seen = [], [], set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            errors.append(f"line {lineno}: empty key")
            continue
        if key in seen:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        seen.add(key)
        pairs.append((key, value))
    return pairs, errors


def _int(value, name):
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an integer, got {value!r}") from None


def parse_config(text):
    """Parse config text; raises :class:`ConfigError` on malformed input."""
    pairs, errors = parse_lines(text)
    if errors:
        raise ConfigError("; ".join(errors))
    raw = dict(pairs)
    if "experiment" not in raw:
        raise ConfigError("experiment: missing")
    cfg = ExperimentConfig(raw.pop("experiment"), text=text)
    if "seed" in raw:
        cfg.seed = _int(raw.pop("seed"), "seed")
    if "n_samples" in raw:
        cfg.n_samples = _int(raw.pop("n_samples"), "n_samples")
    cfg.output_path = raw.pop("output_path", ".")
    cfg.params = raw
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
