"""Batch command line driving the two-phase summarization pipeline.

Subcommands map one-to-one onto pipeline stages (preprocess, select,
summarize, evaluate) plus a ``pipeline`` command that chains them. Flag
values beat config-file values, which beat built-in defaults; the config
file is JSON, named by --config or the PODSELECT_CONFIG environment
variable.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from concurrent import futures
from contextlib import contextmanager
from pathlib import Path

from . import abstractive, corpus, evalharness, preprocess, selection, topics
from .errors import (BackendError, ConfigError, EmptyDocumentError,
                     InsufficientContentError, PodselectError)

logger = logging.getLogger("podselect")

STRATEGIES = ("window", "novelty", "topic", "none")
BACKENDS = ("null", "remote")
PARTIAL_SUFFIX = ".partial"


@contextmanager
def atomic_write(path: Path):
    """Write through a .partial file, renaming only on success.

    An interrupted run leaves the clearly-named partial file behind and
    never a half-written final artifact.
    """
    partial = path.with_name(path.name + PARTIAL_SUFFIX)
    handle = open(partial, "w", encoding="utf-8", newline="")
    try:
        yield handle
    finally:
        handle.close()
    os.replace(partial, path)


def _load_config_mapping(ns) -> dict:
    path = ns.config or os.environ.get("PODSELECT_CONFIG")
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path!r} must hold a JSON object")
    return data


def _resolve(ns, config: dict, key: str, default):
    value = getattr(ns, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _derive_seed(base_seed: int, episode_id: str) -> int:
    """Stable per-episode seed so parallel runs stay reproducible."""
    digest = hashlib.sha256(episode_id.encode("utf-8")).digest()
    return (base_seed * 1_000_003 + int.from_bytes(digest[:8], "big")) % (2 ** 63)


# --- preprocess ---------------------------------------------------------------


def _run_preprocess(input_path: str, out_dir: Path, seed: int,
                    filter_config: preprocess.FilterConfig) -> list[corpus.Episode]:
    episodes = list(corpus.load_episodes(input_path, errors=[]))
    kept, report = preprocess.filter_corpus(episodes, filter_config)

    out_dir.mkdir(parents=True, exist_ok=True)
    with atomic_write(out_dir / "kept.jsonl") as handle:
        corpus.write_episodes(kept, handle)
    with atomic_write(out_dir / "filter_report.json") as handle:
        handle.write(report.to_json() + "\n")

    if kept:
        assignment = preprocess.split_dataset([e.id for e in kept], seed=seed)
        split_payload = assignment.to_jsonl()
    else:
        split_payload = ""
    with atomic_write(out_dir / "split.jsonl") as handle:
        handle.write(split_payload)

    logger.info("preprocess: %d in, %d kept", report.input_count, report.kept_count)
    return kept


def _filter_config_from(ns, config: dict) -> preprocess.FilterConfig:
    kwargs = {}
    for key in ("desc_min_chars", "desc_max_chars", "duplicate_sim_threshold",
                "show_desc_sim_threshold", "desc_min_tokens",
                "english_min_stopword_ratio", "profanity_list_path"):
        value = _resolve(ns, config, key, None)
        if value is not None:
            kwargs[key] = value
    return preprocess.FilterConfig(**kwargs)


def cmd_preprocess(ns) -> int:
    config = _load_config_mapping(ns)
    seed = _resolve(ns, config, "seed", 0)
    _run_preprocess(ns.input, Path(ns.output), seed, _filter_config_from(ns, config))
    return 0


# --- select -------------------------------------------------------------------


def _select_one(record: dict, strategy: str, settings: dict) -> tuple[str, dict | None, str | None]:
    """Worker: build the document and run one selection strategy.

    Takes and returns plain dicts so it can cross a process boundary.
    """
    episode = corpus.Episode(
        id=record["id"],
        show_id=record.get("show_id", ""),
        transcript_text=record.get("transcript", ""),
        description=record.get("description", ""),
        show_description=record.get("show_description", ""),
    )
    try:
        doc = corpus.build_document(episode)
        selector = selection.SelectorConfig(
            window_size=settings.get("window_size"),
            novelty_top_k=settings["top_k"],
            token_budget=settings["budget"],
        )
        if strategy == "window":
            result = selection.select_window(doc, selector)
        elif strategy == "novelty":
            result = selection.select_novelty(doc, selector)
        elif strategy == "topic":
            topic_config = topics.TopicConfig(
                num_topics=settings["topics"],
                seed=_derive_seed(settings["seed"], episode.id),
            )
            model = topics.fit_lda(doc, topic_config)
            result = topics.select_by_topics(doc, model, selector)
        elif strategy == "none":
            result = selection.select_head(doc, settings["budget"])
        else:
            raise ConfigError(f"unknown strategy: {strategy!r}")
        return episode.id, result.to_record(settings["diagnostics"]), None
    except (EmptyDocumentError, InsufficientContentError) as exc:
        return episode.id, None, str(exc)


def _run_select(input_path: str, output_path: Path, strategy: str,
                settings: dict, jobs: int) -> int:
    records = [e.to_record() for e in corpus.load_episodes(input_path, errors=[])]
    skipped = 0
    results: list[dict] = []
    if jobs > 1 and len(records) > 1:
        with futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(
                _select_one, records,
                [strategy] * len(records), [settings] * len(records),
                chunksize=max(1, len(records) // (jobs * 4) or 1),
            ))
    else:
        outcomes = [_select_one(record, strategy, settings) for record in records]
    for episode_id, payload, error in outcomes:
        if error is not None:
            logger.warning("skipping %s: %s", episode_id, error)
            skipped += 1
            continue
        results.append(payload)
    with atomic_write(output_path) as handle:
        for payload in results:
            handle.write(json.dumps(payload, ensure_ascii=False) + "\n")
    logger.info("select(%s): %d selected, %d skipped", strategy, len(results), skipped)
    return 0


def _select_settings(ns, config: dict) -> tuple[str, dict, int]:
    strategy = _resolve(ns, config, "strategy", "window")
    if strategy not in STRATEGIES:
        raise ConfigError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    settings = {
        "window_size": _resolve(ns, config, "window_size", None),
        "top_k": _resolve(ns, config, "top_k", selection.DEFAULT_TOP_K),
        "topics": _resolve(ns, config, "topics", topics.DEFAULT_NUM_TOPICS),
        "budget": _resolve(ns, config, "budget", selection.DEFAULT_TOKEN_BUDGET),
        "seed": _resolve(ns, config, "seed", 0),
        "diagnostics": bool(getattr(ns, "diagnostics", False)),
    }
    jobs = _resolve(ns, config, "jobs", None)
    return strategy, settings, int(jobs) if jobs else (os.cpu_count() or 1)


def cmd_select(ns) -> int:
    config = _load_config_mapping(ns)
    strategy, settings, jobs = _select_settings(ns, config)
    return _run_select(ns.input, Path(ns.output), strategy, settings, jobs)


# --- summarize ----------------------------------------------------------------


def _make_backend(name: str, endpoint: str | None):
    if name == "null":
        return abstractive.NullBackend()
    if name == "remote":
        if not endpoint:
            raise ConfigError("--endpoint is required for the remote backend")
        return abstractive.RemoteBackend(endpoint)
    raise ConfigError(f"unknown backend {name!r}; choose from {BACKENDS}")


def _run_summarize(selections_path: str, episodes_path: str, output_path: Path,
                   backend, budget: int, jobs: int) -> int:
    documents: dict[str, corpus.Document] = {}
    for episode in corpus.load_episodes(episodes_path, errors=[]):
        try:
            documents[episode.id] = corpus.build_document(episode)
        except EmptyDocumentError as exc:
            logger.warning("skipping %s: %s", episode.id, exc)

    inputs: list[abstractive.BackendInput] = []
    with open(selections_path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, 1):
            if not line.strip():
                continue
            record = json.loads(line)
            episode_id = record["id"]
            doc = documents.get(episode_id)
            if doc is None:
                logger.warning("selection line %d: no episode %r", line_number, episode_id)
                continue
            result = selection.SelectionResult(
                episode_id=episode_id,
                strategy=record.get("strategy", "window"),
                sentence_indices=tuple(record["indices"]),
                selected_token_count=record.get("tokens", 0),
            )
            inputs.append(abstractive.enforce_budget(result, doc, budget))

    def run_one(backend_input):
        return abstractive.summarize(backend_input, backend, max_length=budget)

    summaries: list[abstractive.Summary | None] = [None] * len(inputs)
    failures = 0
    max_workers = max(1, jobs)
    with futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
        jobs_map = {pool.submit(run_one, item): position
                    for position, item in enumerate(inputs)}
        for future in futures.as_completed(jobs_map):
            position = jobs_map[future]
            try:
                summaries[position] = future.result()
            except BackendError as exc:
                failures += 1
                logger.error("backend failure for %s: %s",
                             inputs[position].episode_id, exc)

    with atomic_write(output_path) as handle:
        for summary in summaries:
            if summary is not None:
                handle.write(json.dumps(summary.to_record(), ensure_ascii=False) + "\n")
    logger.info("summarize: %d written, %d failed", len(inputs) - failures, failures)
    return 1 if failures else 0


def cmd_summarize(ns) -> int:
    config = _load_config_mapping(ns)
    backend = _make_backend(
        _resolve(ns, config, "backend", "null"),
        _resolve(ns, config, "endpoint", None),
    )
    budget = _resolve(ns, config, "budget", selection.DEFAULT_TOKEN_BUDGET)
    jobs = _resolve(ns, config, "jobs", None) or 4
    return _run_summarize(ns.input, ns.episodes, Path(ns.output),
                          backend, budget, int(jobs))


# --- evaluate -----------------------------------------------------------------


def _load_summaries(path: str) -> list[abstractive.Summary]:
    out: list[abstractive.Summary] = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            out.append(abstractive.Summary(
                episode_id=record["id"],
                text=record.get("summary", ""),
                backend_id=record.get("backend", "unknown"),
            ))
    return out


def _load_references(path: str, raw: bool) -> dict[str, str]:
    references: dict[str, str] = {}
    for episode in corpus.load_episodes(path, errors=[]):
        description = episode.description
        references[episode.id] = description if raw else preprocess.clean_description(description)
    return references


def _run_evaluate(summaries_path: str, references_path: str, output_path: Path,
                  method_id: str, fmt: str, raw_references: bool) -> int:
    summaries = _load_summaries(summaries_path)
    if not summaries:
        raise PodselectError(f"no summaries to evaluate in {summaries_path!r}")
    references = _load_references(references_path, raw_references)
    row = evalharness.evaluate_run(summaries, references, method_id)
    rendered = evalharness.render_table([row], fmt)
    with atomic_write(output_path) as handle:
        handle.write(rendered)
    logger.info("evaluate: %s P=%.2f R=%.2f F=%.2f",
                method_id, row.rouge_l_p, row.rouge_l_r, row.rouge_l_f)
    return 0


def cmd_evaluate(ns) -> int:
    config = _load_config_mapping(ns)
    fmt = _resolve(ns, config, "format", "text")
    return _run_evaluate(ns.input, ns.references, Path(ns.output),
                         ns.method_id or "run", fmt, bool(ns.raw_references))


# --- pipeline -----------------------------------------------------------------


_REPORT_EXT = {"text": "txt", "csv": "csv", "json": "json"}


def cmd_pipeline(ns) -> int:
    config = _load_config_mapping(ns)
    out_dir = Path(ns.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = _resolve(ns, config, "seed", 0)
    strategy, settings, jobs = _select_settings(ns, config)
    budget = settings["budget"]
    fmt = _resolve(ns, config, "format", "text")
    if fmt not in _REPORT_EXT:
        raise ConfigError(f"unknown report format {fmt!r}")
    backend = _make_backend(
        _resolve(ns, config, "backend", "null"),
        _resolve(ns, config, "endpoint", None),
    )
    resume = bool(ns.resume)

    kept_path = out_dir / "kept.jsonl"
    preprocess_outputs = [kept_path, out_dir / "filter_report.json", out_dir / "split.jsonl"]
    if resume and all(p.exists() for p in preprocess_outputs):
        logger.info("pipeline: preprocess outputs exist, skipping")
    else:
        _run_preprocess(ns.input, out_dir, seed, _filter_config_from(ns, config))

    selections_path = out_dir / "selections.jsonl"
    if resume and selections_path.exists():
        logger.info("pipeline: selections exist, skipping")
    else:
        _run_select(str(kept_path), selections_path, strategy, settings, jobs)

    summaries_path = out_dir / "summaries.jsonl"
    if resume and summaries_path.exists():
        logger.info("pipeline: summaries exist, skipping")
    else:
        backend_jobs = int(_resolve(ns, config, "jobs", None) or 4)
        status = _run_summarize(str(selections_path), str(kept_path), summaries_path,
                                backend, budget, backend_jobs)
        if status != 0:
            return status

    report_path = out_dir / f"report.{_REPORT_EXT[fmt]}"
    if resume and report_path.exists():
        logger.info("pipeline: report exists, skipping")
    else:
        _run_evaluate(str(summaries_path), str(kept_path), report_path,
                      strategy, fmt, raw_references=False)
    return 0


# --- parser and entry point ---------------------------------------------------


def _add_io_flags(parser, output_help: str):
    parser.add_argument("--input", required=True, help="input path")
    parser.add_argument("--output", required=True, help=output_help)


def _add_shared_flags(parser):
    parser.add_argument("--seed", type=int, default=None,
                        help="random seed for anything stochastic (default: 0)")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker count; selection defaults to the CPU count, "
                             "backend requests default to 4 concurrent")
    parser.add_argument("--config", default=None,
                        help="JSON config file; PODSELECT_CONFIG is the fallback")


def _add_strategy_flags(parser):
    parser.add_argument("--strategy", choices=STRATEGIES, default=None,
                        help="selection strategy (default: window); 'none' passes "
                             "the transcript head straight through")
    parser.add_argument("--window-size", dest="window_size", type=int, default=None,
                        help="sentences per window (default: 40; the novelty "
                             "strategy defaults to 25)")
    parser.add_argument("--top-k", dest="top_k", type=int, default=None,
                        help="extra top-scoring sentences merged by the novelty "
                             "strategy (default: 5)")
    parser.add_argument("--topics", type=int, default=None,
                        help="topic count for the topic strategy (default: 5)")
    parser.add_argument("--budget", type=int, default=None,
                        help="token budget handed to the backend (default: 1024)")
    parser.add_argument("--diagnostics", action="store_true",
                        help="include per-window scores in the selections file")


def _add_backend_flags(parser):
    parser.add_argument("--backend", choices=BACKENDS, default=None,
                        help="summarization backend (default: null)")
    parser.add_argument("--endpoint", default=None,
                        help="base URL of the remote backend, e.g. http://host:8080")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="podselect",
        description="Two-phase podcast summarization: extractive selection "
                    "followed by an abstractive backend.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="filter a corpus and emit the dataset split")
    _add_io_flags(p, "output directory for kept.jsonl, filter_report.json, split.jsonl")
    _add_shared_flags(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("select", help="run extractive selection over episodes")
    _add_io_flags(p, "selections JSONL path")
    _add_strategy_flags(p)
    _add_shared_flags(p)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("summarize", help="cap selections and run them through a backend")
    _add_io_flags(p, "summaries JSONL path")
    p.add_argument("--episodes", required=True,
                   help="episodes JSONL the selections refer to")
    p.add_argument("--budget", type=int, default=None,
                   help="token budget enforced before the backend call (default: 1024)")
    _add_backend_flags(p)
    _add_shared_flags(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("evaluate", help="score summaries against reference descriptions")
    _add_io_flags(p, "report path")
    p.add_argument("--references", required=True,
                   help="episodes JSONL providing reference descriptions")
    p.add_argument("--format", choices=("text", "csv", "json"), default=None,
                   help="report format (default: text)")
    p.add_argument("--method-id", dest="method_id", default=None,
                   help="row label in the report (default: run)")
    p.add_argument("--raw-references", action="store_true",
                   help="score against raw descriptions instead of cleaned ones")
    _add_shared_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="preprocess, select, summarize, and evaluate")
    _add_io_flags(p, "output directory for all stage artifacts")
    _add_strategy_flags(p)
    _add_backend_flags(p)
    p.add_argument("--format", choices=("text", "csv", "json"), default=None,
                   help="report format (default: text)")
    p.add_argument("--resume", action="store_true",
                   help="skip stages whose outputs already exist")
    _add_shared_flags(p)
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except ConfigError as exc:
        logger.error("%s", exc)
        return 2
    except PodselectError as exc:
        logger.error("%s", exc)
        return 1
    except OSError as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
