"""Command-line pipeline driver.

One experiment is one JSON config file; flags override config values.  The
``run`` subcommand executes the whole pipeline (prepare, annotate, train,
augment, retrain, generate, score, analyze) and the other subcommands expose
the stages individually for inspection and partial reruns.  The pipeline is
fully deterministic: rerunning on unchanged inputs rewrites every artifact
byte for byte.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import augment as aug
from . import errtype
from . import evaluation as ev
from . import gec_ingest
from .corpus import (
    DEFAULT_MARKER,
    Corpus,
    parse_fcg,
    serialize_fcg,
)
from .generator import (
    ExternalClient,
    GeneratorModel,
    RetrievalModel,
    generate_batch,
    train_retrieval,
)

log = logging.getLogger("fcg_lab")

REGIMES = ("none", "combined", "multistage")


class ConfigError(ValueError):
    """Bad experiment configuration."""


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for reporting."""

    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclasses.dataclass
class ExperimentConfig:
    """Everything a single experiment needs, resolved to absolute paths."""

    gold_train: Path
    gold_test: Path
    out: Path
    gold_dev: Path | None = None
    pseudo_sources: tuple[Path, ...] = ()
    lexicon: Path | None = None
    labels: Path | None = None
    categories: Path | None = None
    regime: str = "none"
    cap: int | None = None
    window: int = 1
    marker: str = DEFAULT_MARKER
    abstain_threshold: float = 0.0
    generator: str = "retrieval"
    external: str | None = None
    snap: bool = False
    seed: int = 0  # reserved; the pipeline has no stochastic stage yet

    def __post_init__(self) -> None:
        if self.regime not in REGIMES:
            raise ConfigError(f"regime must be one of {REGIMES}, got {self.regime!r}")
        if self.regime != "none" and not self.pseudo_sources:
            raise ConfigError(f"regime {self.regime!r} requires pseudo_sources")
        if self.generator not in ("retrieval", "external"):
            raise ConfigError(
                f"generator must be retrieval|external, got {self.generator!r}"
            )
        if self.generator == "external" and not self.external:
            raise ConfigError("generator external requires an endpoint")
        if self.cap is not None and self.cap < 0:
            raise ConfigError(f"cap must be non-negative, got {self.cap}")
        if not 0.0 <= self.abstain_threshold <= 1.0:
            raise ConfigError(
                f"abstain_threshold must be in [0, 1], got {self.abstain_threshold}"
            )


_CONFIG_KEYS = {f.name for f in dataclasses.fields(ExperimentConfig)}
_PATH_KEYS = ("gold_train", "gold_dev", "gold_test", "lexicon", "labels", "categories", "out")


def load_config(path: Path) -> ExperimentConfig:
    """Load a JSON config; relative paths resolve against the config file."""
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    unknown = set(payload) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {sorted(unknown)}")
    base = path.resolve().parent
    kwargs: dict = {}
    for key, value in payload.items():
        if key in _PATH_KEYS and value is not None:
            kwargs[key] = base / value
        elif key == "pseudo_sources":
            kwargs[key] = tuple(base / p for p in value)
        else:
            kwargs[key] = value
    missing = {"gold_train", "gold_test", "out"} - set(kwargs)
    if missing:
        raise ConfigError(f"{path}: missing required config keys: {sorted(missing)}")
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Fold command-line flags over a loaded config; flags win."""
    updates: dict = {}
    if getattr(args, "regime", None) is not None:
        updates["regime"] = args.regime
    if getattr(args, "cap", None) is not None:
        updates["cap"] = args.cap
    if getattr(args, "marker", None) is not None:
        updates["marker"] = args.marker
    if getattr(args, "threshold", None) is not None:
        updates["abstain_threshold"] = args.threshold
    if getattr(args, "external", None) is not None:
        updates["generator"] = "external"
        updates["external"] = args.external
    if getattr(args, "out", None) is not None:
        updates["out"] = Path(args.out)
    if not updates:
        return config
    return dataclasses.replace(config, **updates)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def _load_corpus(
    path: Path, *, split: str, expect_comments: bool, snap: bool = False
) -> Corpus:
    return parse_fcg(
        _read(path),
        expect_comments=expect_comments,
        snap=snap,
        split_name=split,
        source=path.name,
    )


def _make_generator(config: ExperimentConfig, model_path: Path) -> GeneratorModel:
    if config.generator == "external":
        assert config.external is not None
        return ExternalClient(config.external, marker=config.marker)
    return RetrievalModel.from_manifest(_read(model_path))


def stage_prepare(config: ExperimentConfig) -> dict[str, Corpus]:
    """Parse and normalize the gold splits into out/prepared/."""
    corpora = {
        "train": _load_corpus(
            config.gold_train, split="train", expect_comments=True, snap=config.snap
        ),
        "test": _load_corpus(
            config.gold_test, split="test", expect_comments=False, snap=config.snap
        ),
    }
    if config.gold_dev is not None:
        corpora["dev"] = _load_corpus(
            config.gold_dev, split="dev", expect_comments=False, snap=config.snap
        )
    for name, corpus in sorted(corpora.items()):
        with_comments = name == "train" or any(
            s.reference_comment is not None for s in corpus
        )
        _write(
            config.out / "prepared" / f"{name}.tsv",
            serialize_fcg(corpus, with_comments=with_comments),
        )
        log.info("prepared %s: %d samples", name, len(corpus))
    return corpora


def stage_annotate(config: ExperimentConfig) -> list:
    """Ingest pseudo sources, keep preposition-error sentences, write JSONL."""
    lexicon = (
        errtype.load_lexicon(_read(config.lexicon), source=config.lexicon.name)
        if config.lexicon is not None
        else errtype.PrepositionLexicon.default()
    )
    pairs = []
    for source in config.pseudo_sources:
        text = _read(source)
        if source.suffix == ".m2":
            pairs.extend(gec_ingest.parse_m2(text, source=source.name))
        else:
            pairs.extend(gec_ingest.parse_parallel_tsv(text, source=source.name))
    selected = errtype.select_prep_sentences(pairs, lexicon=lexicon)
    _write(config.out / "selected.jsonl", aug.write_selected(selected))
    log.info("annotate: kept %d/%d pairs", len(selected), len(pairs))
    return selected


def stage_train_base(config: ExperimentConfig, gold_train: Corpus) -> RetrievalModel:
    """Train the gold-only model used to label pseudo sentences."""
    model = train_retrieval(
        [(gold_train, 1)],
        abstain_threshold=config.abstain_threshold,
        marker=config.marker,
    )
    _write(config.out / "model_base.json", model.to_manifest())
    return model


def stage_augment(
    config: ExperimentConfig, selected: list, model: RetrievalModel
) -> Corpus:
    """Self-label the selected sentences into a pseudo corpus + provenance."""
    pseudo = aug.build_pseudo(
        selected,
        model,
        cap=config.cap,
        window=config.window,
        generator_id="retrieval-base",
        regime=config.regime,
    )
    corpus = aug.pseudo_corpus(pseudo)
    _write(
        config.out / "pseudo.tsv", serialize_fcg(corpus, with_comments=True)
    )
    _write(config.out / "pseudo_provenance.jsonl", aug.write_provenance(pseudo))
    log.info("augment: %d pseudo samples", len(corpus))
    return corpus


def stage_retrain(
    config: ExperimentConfig, pseudo: Corpus, gold_train: Corpus
) -> RetrievalModel:
    """Train the final model under the configured regime and write artifacts."""
    schedules = aug.make_regimes(pseudo, gold_train)
    if config.regime == "multistage":
        datasets = schedules.multistage
    else:
        datasets = schedules.combined  # gold-only when pseudo is empty
    schedule = {
        "regime": config.regime,
        "datasets": [
            {"split": corpus.split_name, "priority": priority, "n": len(corpus)}
            for corpus, priority in datasets
        ],
    }
    _write(
        config.out / "schedule.json",
        json.dumps(schedule, sort_keys=True, ensure_ascii=False, indent=2) + "\n",
    )
    model = train_retrieval(
        datasets,
        abstain_threshold=config.abstain_threshold,
        marker=config.marker,
    )
    _write(config.out / "model.json", model.to_manifest())
    return model


def stage_generate(config: ExperimentConfig, test: Corpus) -> Corpus:
    """Fill system comments over the test split and write outputs.tsv."""
    if config.generator == "external":
        with _make_generator(config, config.out / "model.json") as client:
            outputs = generate_batch(client, test)
    else:
        model = _make_generator(config, config.out / "model.json")
        outputs = generate_batch(model, test)
    _write(
        config.out / "outputs.tsv",
        serialize_fcg(outputs, with_comments=True, comment_field="system"),
    )
    n_generated = sum(1 for s in outputs if s.system_comment is not None)
    log.info("generate: %d/%d comments", n_generated, len(outputs))
    return outputs


def _load_labels(config: ExperimentConfig) -> list[ev.HumanLabel] | None:
    if config.labels is None:
        return None
    return ev.parse_labels(_read(config.labels), source=config.labels.name)


def _load_categories(config: ExperimentConfig) -> list[tuple[str, str]] | None:
    if config.categories is None:
        return None
    return ev.parse_categories(_read(config.categories), source=config.categories.name)


def stage_score(
    config: ExperimentConfig,
    outputs: Corpus,
    references: Corpus,
    *,
    labels: list[ev.HumanLabel] | None = None,
    train: Corpus | None = None,
    categories: list[tuple[str, str]] | None = None,
) -> ev.EvalReport:
    """Score outputs against references and write report.json/report.txt."""
    report = ev.score_outputs(
        outputs, references, labels=labels, train=train, categories=categories
    )
    _write(config.out / "report.json", ev.report_to_json(report))
    _write(config.out / "report.txt", ev.report_to_text(report))
    if report.agreement is not None:
        _write(config.out / "agreement.csv", ev.bins_to_csv(report.agreement))
    log.info("score: corpus BLEU %.4f", report.corpus_bleu.value)
    return report


def _run(config: ExperimentConfig) -> int:
    def stage(name, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            raise StageError(name, exc) from exc

    corpora = stage("prepare", stage_prepare, config)
    pseudo = Corpus(samples=(), split_name="pseudo")
    base = stage("train", stage_train_base, config, corpora["train"])
    if config.regime != "none":
        selected = stage("annotate", stage_annotate, config)
        pseudo = stage("augment", stage_augment, config, selected, base)
    model = stage("retrain", stage_retrain, config, pseudo, corpora["train"])
    del model  # generate reloads from the manifest so reruns match exactly
    outputs = stage("generate", stage_generate, config, corpora["test"])
    labels = stage("score", _load_labels, config)
    categories = stage("analyze", _load_categories, config)
    stage(
        "score",
        stage_score,
        config,
        outputs,
        corpora["test"],
        labels=labels,
        train=corpora["train"],
        categories=categories,
    )
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="experiment JSON file")
    parser.add_argument("--regime", choices=REGIMES)
    parser.add_argument("--cap", type=int)
    parser.add_argument("--marker")
    parser.add_argument("--threshold", type=float)
    parser.add_argument("--external", metavar="CMD|HOST:PORT")
    parser.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fcg-lab",
        description="Feedback comment generation pipeline over FCG TSV corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("run", "run the full pipeline"),
        ("prepare", "parse and normalize the gold splits"),
        ("annotate", "select preposition-error sentences from pseudo sources"),
        ("augment", "label selected sentences into a pseudo corpus"),
        ("train", "build the retrieval model for the configured regime"),
        ("generate", "fill system comments over the test split"),
        ("score", "BLEU (and F1, given labels) against references"),
        ("analyze", "full agreement/overlap/category report (needs labels)"),
    ):
        p = sub.add_parser(name, help=doc)
        _add_config_flags(p)
    return parser


def _dispatch(command: str, config: ExperimentConfig) -> int:
    if command == "run":
        return _run(config)
    if command == "prepare":
        stage_prepare(config)
        return 0
    if command == "annotate":
        stage_annotate(config)
        return 0
    if command == "augment":
        gold = _load_corpus(
            config.gold_train, split="train", expect_comments=True, snap=config.snap
        )
        base = stage_train_base(config, gold)
        selected = aug.read_selected(_read(config.out / "selected.jsonl"))
        stage_augment(config, selected, base)
        return 0
    if command == "train":
        gold = _load_corpus(
            config.gold_train, split="train", expect_comments=True, snap=config.snap
        )
        if config.regime == "none":
            stage_train_base(config, gold)
            stage_retrain(config, Corpus(samples=(), split_name="pseudo"), gold)
        else:
            pseudo = _load_corpus(
                config.out / "pseudo.tsv", split="pseudo", expect_comments=True
            )
            stage_retrain(config, pseudo, gold)
        return 0
    if command == "generate":
        test = _load_corpus(
            config.gold_test, split="test", expect_comments=False, snap=config.snap
        )
        stage_generate(config, test)
        return 0
    if command in ("score", "analyze"):
        references = _load_corpus(
            config.gold_test, split="test", expect_comments=True, snap=config.snap
        )
        outputs = _load_corpus(
            config.out / "outputs.tsv", split="test", expect_comments=False
        )
        outputs = Corpus(
            samples=tuple(
                dataclasses.replace(
                    s, system_comment=s.reference_comment, reference_comment=None
                )
                for s in outputs
            ),
            split_name="test",
        )
        labels = _load_labels(config)
        if command == "analyze":
            if labels is None:
                raise ConfigError("analyze requires a labels path in the config")
            train = _load_corpus(
                config.gold_train, split="train", expect_comments=True, snap=config.snap
            )
            categories = _load_categories(config)
        else:
            train = None
            categories = None
        stage_score(
            config,
            outputs,
            references,
            labels=labels,
            train=train,
            categories=categories,
        )
        return 0
    raise AssertionError(f"unhandled command {command!r}")


def main(argv: list[str] | None = None) -> int:
    try:
        logging.basicConfig(
            level=os.environ.get("FCG_LAB_LOG", "WARNING").upper(),
            format="%(levelname)s %(name)s: %(message)s",
        )
    except ValueError:
        logging.basicConfig(level=logging.WARNING)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = apply_overrides(load_config(Path(args.config)), args)
    except (ConfigError, OSError) as exc:
        print(f"fcg-lab: [config] {exc}", file=sys.stderr)
        return 2
    try:
        return _dispatch(args.command, config)
    except StageError as exc:
        print(f"fcg-lab: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"fcg-lab: [config] {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"fcg-lab: [{args.command}] {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
