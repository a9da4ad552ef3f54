"""Pipeline configuration: a dataclass mirrored by a flat ``key = value`` file."""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from privlabel.classify import Hyper
from privlabel.errors import ConfigError

_SECTION = "pipeline"
_PATH_FIELDS = ("corpus_dir", "training_corpus", "embeddings", "models_dir", "rules_file",
                "registry_file", "templates_dir", "out_dir")


@dataclass(frozen=True)
class PipelineConfig:
    """Paths are resolved relative to the config file's directory when loaded
    from disk. ``rules_file`` and ``registry_file`` default to the packaged
    tables; ``models_dir`` defaults to ``<out_dir>/models``.
    """

    corpus_dir: Path
    embeddings: Path
    out_dir: Path
    training_corpus: Path | None = None
    models_dir: Path | None = None
    rules_file: Path | None = None
    registry_file: Path | None = None
    templates_dir: Path | None = None
    seed: int = 0
    learning_rate: float = 5.0
    epochs: int = 1000
    l2: float = 1e-5
    train_ratio: float = 0.8
    bootstrap_resamples: int = 200
    threshold: float = 0.5
    template_threshold: float = 0.8
    template_two_sided: bool = True
    short_item_limit: int = 20
    jobs: int = 1

    def __post_init__(self):
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not 0.0 < self.train_ratio < 1.0:
            raise ConfigError("train_ratio must lie in (0, 1)")
        if not 0.0 < self.threshold < 1.0:
            raise ConfigError("threshold must lie in (0, 1)")
        if not -1.0 <= self.template_threshold <= 1.0:
            raise ConfigError("template_threshold must lie in [-1, 1]")

    @property
    def hyper(self) -> Hyper:
        return Hyper(self.learning_rate, self.epochs, self.l2, self.seed)

    @property
    def models_path(self) -> Path:
        return self.models_dir if self.models_dir is not None else self.out_dir / "models"

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    def check_paths(self, stages) -> None:
        """Every input path the requested stages read must exist."""
        need = {"corpus_dir": self.corpus_dir}
        if stages & {"train", "classify", "templates"}:
            need["embeddings"] = self.embeddings
        if "train" in stages:
            need["training_corpus"] = self.training_corpus
        if "templates" in stages:
            need["templates_dir"] = self.templates_dir
        for key in ("rules_file", "registry_file"):
            if getattr(self, key) is not None:
                need[key] = getattr(self, key)
        for key, path in need.items():
            if path is None:
                raise ConfigError(f"{key} is required for stages {sorted(stages)}")
            if not Path(path).exists():
                raise ConfigError(f"{key} does not exist: {path}")


def _coerce(f: dataclasses.Field, raw: str, base: Path):
    kind = f.type
    if f.name in _PATH_FIELDS:
        p = Path(raw).expanduser()
        return p if p.is_absolute() else base / p
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{f.name}: cannot parse {raw!r} as {kind}") from None
    if kind == "bool":
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{f.name}: cannot parse {raw!r} as bool")
    return raw


def config_from_mapping(values: dict, base: Path = Path(".")) -> PipelineConfig:
    fields = {f.name: f for f in dataclasses.fields(PipelineConfig)}
    kwargs = {}
    for key, raw in values.items():
        if key not in fields:
            raise ConfigError(f"unknown config key {key!r}")
        kwargs[key] = _coerce(fields[key], str(raw), base)
    missing = [f.name for f in fields.values()
               if f.default is dataclasses.MISSING and f.name not in kwargs]
    if missing:
        raise ConfigError(f"missing required config keys: {', '.join(missing)}")
    return PipelineConfig(**kwargs)


def load_config(path) -> PipelineConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(f"[{_SECTION}]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return config_from_mapping(dict(parser[_SECTION]), path.parent.resolve())


def dump_config(config: PipelineConfig) -> str:
    lines = []
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if value is not None:
            lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"

