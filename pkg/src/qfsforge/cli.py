"""Command-line entry point: the pipeline as file-to-file subcommands.

    qfs-forge extract-evidence  (document, summary) -> training-pair JSONL
    qfs-forge gen-query         corpus -> query JSONL (pair oracle or tf-idf)
    qfs-forge rank              corpus + queries -> ranked-sentence JSONL
    qfs-forge evaluate          intrinsic or extrinsic report JSON
    qfs-forge pipeline          one-shot: queries -> rank -> summarize -> rouge

Exit codes: 0 success, 2 usage error, 3 data error, 4 I/O error. All
outputs are byte-reproducible for a fixed config; --jobs only changes
wall-clock time, never bytes. QFS_FORGE_STOPWORDS overrides the bundled
stopword list.
"""
from __future__ import annotations

import argparse
import functools
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import corpus as corpus_mod
from . import evidence as evidence_mod
from ._parallel import default_jobs, pmap
from .config import ConfigError, PipelineConfig, config_digest, load_config
from .corpus import Corpus, CorpusError, CorpusKind, load_corpus
from .embed import EmbeddingError, EmbeddingProvider
from .evalsuite import (
    extrinsic_report_to_dict,
    intrinsic_report_to_dict,
    intrinsic_similarity,
    load_bridge_summaries,
    run_extrinsic,
    write_report,
)
from .evidence import EvidenceQuery, build_df_table, load_queries, write_queries
from .rank import build_model_input, rank_sentences, ranked_to_dict, write_ranked
from .textnorm import load_stopwords

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_IO = 4

STOPWORDS_ENV = "QFS_FORGE_STOPWORDS"


def _stopword_path(flag_value: Optional[str]) -> Optional[str]:
    if flag_value:
        return flag_value
    return os.environ.get(STOPWORDS_ENV) or None


def _provider_from_args(args) -> EmbeddingProvider:
    if getattr(args, "embed_file", None):
        return EmbeddingProvider.from_vector_file(args.embed_file)
    return EmbeddingProvider.hash_fallback(
        dimension=args.embed_dim, seed=args.embed_seed
    )


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--stopwords", help="override bundled stopword list")
    parser.add_argument("--stemming", action="store_true",
                        help="enable light suffix stripping")
    parser.add_argument("--jobs", type=int, default=default_jobs(),
                        help="worker processes (output is N-independent)")


def _add_embed_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--embed-file", help="GloVe-style text vector file")
    parser.add_argument("--embed-dim", type=int, default=64,
                        help="hash-fallback vector dimension")
    parser.add_argument("--embed-seed", type=int, default=0,
                        help="hash-fallback seed")


# Top-level workers so ProcessPoolExecutor can pickle them.

def _extract_one(sample, cap, stopwords, stemming):
    return evidence_mod.extract_evidence(
        sample.document, sample.summary or "", cap=cap,
        sample_id=sample.sample_id, stopwords=stopwords, stemming=stemming,
    )


def _docquery_one(sample, cap, df_table, stopwords, stemming):
    return evidence_mod.generate_query_document_only(
        sample.document, cap=cap, df_table=df_table,
        sample_id=sample.sample_id, stopwords=stopwords, stemming=stemming,
    )


def _rank_one(sample, queries, provider, budget, query_prefix, stopwords, stemming):
    query = queries.get(sample.sample_id, EvidenceQuery(
        keywords=(), source="document_only", sample_id=sample.sample_id))
    ranked = rank_sentences(
        sample.document, query, provider,
        sample_id=sample.sample_id, stopwords=stopwords, stemming=stemming,
    )
    record = ranked_to_dict(ranked, query)
    if budget is not None:
        record["model_input"] = build_model_input(
            ranked, query, budget, query_prefix=query_prefix
        )
    return record


def cmd_extract_evidence(args) -> int:
    corpus = load_corpus(args.corpus, args.kind)
    if corpus.kind is not CorpusKind.PAIR and corpus.kind is not CorpusKind.TRIAD:
        raise CorpusError("extract-evidence needs a pair or triad corpus")
    stopwords = load_stopwords(_stopword_path(args.stopwords))
    worker = functools.partial(
        _extract_one, cap=args.cap, stopwords=stopwords, stemming=args.stemming
    )
    queries = pmap(worker, corpus.samples, args.jobs)
    records = []
    skipped = 0
    for sample, query in zip(corpus.samples, queries):
        if not query.keywords:
            skipped += 1
            continue
        records.append({
            "sample_id": sample.sample_id,
            "document": sample.document,
            "evidence": query.as_text(),
        })
    with Path(args.out).open("w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False))
            f.write("\n")
    print(f"{len(records)} written, {skipped} skipped")
    return EXIT_OK


def cmd_gen_query(args) -> int:
    corpus = load_corpus(args.corpus, args.kind)
    stopwords = load_stopwords(_stopword_path(args.stopwords))
    if args.mode == "pair-oracle":
        if corpus.kind is CorpusKind.CLUSTERED:
            raise CorpusError("pair-oracle mode needs summaries (pair/triad corpus)")
        worker = functools.partial(
            _extract_one, cap=args.cap, stopwords=stopwords, stemming=args.stemming
        )
    else:
        df_table = build_df_table(
            (s.document for s in corpus), stopwords, args.stemming
        )
        worker = functools.partial(
            _docquery_one, cap=args.cap, df_table=df_table,
            stopwords=stopwords, stemming=args.stemming,
        )
    queries = pmap(worker, corpus.samples, args.jobs)
    write_queries(queries, args.out)
    print(f"{len(queries)} queries written")
    return EXIT_OK


def cmd_rank(args) -> int:
    corpus = load_corpus(args.corpus, args.kind)
    queries = load_queries(args.queries)
    stopwords = load_stopwords(_stopword_path(args.stopwords))
    provider = _provider_from_args(args)
    worker = functools.partial(
        _rank_one, queries=queries, provider=provider, budget=args.budget,
        query_prefix=args.query_prefix, stopwords=stopwords, stemming=args.stemming,
    )
    records = pmap(worker, corpus.samples, args.jobs)
    write_ranked(records, args.out)
    print(f"{len(records)} documents ranked")
    return EXIT_OK


def _config_from_args(args, stopword_path: Optional[str]) -> PipelineConfig:
    return PipelineConfig(
        stopword_path=stopword_path,
        stemming=args.stemming,
        evidence_cap=args.cap,
        extractive_k=args.extractive_k,
        rouge_variants=tuple(args.variants.split(",")) if args.variants else
        PipelineConfig().rouge_variants,
    )


def cmd_evaluate(args) -> int:
    corpus = load_corpus(args.corpus, args.kind)
    stopword_path = _stopword_path(args.stopwords)
    stopwords = load_stopwords(stopword_path)
    provider = _provider_from_args(args)
    if args.mode == "intrinsic":
        if not args.queries:
            raise ConfigError("--queries is required for intrinsic evaluation")
        queries = load_queries(args.queries)
        report = intrinsic_similarity(
            corpus, queries, provider, stopwords=stopwords, stemming=args.stemming
        )
        write_report(intrinsic_report_to_dict(report), args.report)
    else:
        config = _config_from_args(args, stopword_path)
        bridge = None
        if args.summarizer == "bridge_file":
            if not args.bridge_file:
                raise ConfigError("--bridge-file is required with bridge_file")
            bridge = load_bridge_summaries(args.bridge_file)
        queries = load_queries(args.queries) if args.queries else None
        report = run_extrinsic(
            corpus, args.query_mode, provider,
            config=config, bridge_summaries=bridge, queries=queries,
            audit_path=args.audit,
        )
        write_report(extrinsic_report_to_dict(report), args.report)
    print(f"report written to {args.report}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    config = load_config(args.config) if args.config else PipelineConfig()
    corpus = load_corpus(args.corpus, "triad")
    if config.embed_file:
        provider = EmbeddingProvider.from_vector_file(config.embed_file)
    else:
        provider = EmbeddingProvider.hash_fallback(
            dimension=config.embed_dim, seed=config.embed_seed
        )
    report = run_extrinsic(
        corpus, args.query_mode, provider, config=config, audit_path=args.audit
    )
    write_report(extrinsic_report_to_dict(report), args.report)
    print(f"report written to {args.report}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfs-forge",
        description="Evidence-based query generation, sentence ranking, and "
                    "ROUGE evaluation over JSONL summarization corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-evidence",
                       help="extract (document, evidence) training pairs")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", default="pair", choices=[k.value for k in CorpusKind])
    p.add_argument("--out", required=True)
    p.add_argument("--cap", type=int, default=6)
    _add_common_flags(p)
    p.set_defaults(func=cmd_extract_evidence)

    p = sub.add_parser("gen-query", help="generate evidence queries per sample")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", default="pair", choices=[k.value for k in CorpusKind])
    p.add_argument("--mode", default="document-only",
                   choices=["document-only", "pair-oracle"])
    p.add_argument("--out", required=True)
    p.add_argument("--cap", type=int, default=6)
    _add_common_flags(p)
    p.set_defaults(func=cmd_gen_query)

    p = sub.add_parser("rank", help="rank sentences against per-sample queries")
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", default="triad", choices=[k.value for k in CorpusKind])
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=int,
                   help="also emit a model_input field under this word budget")
    p.add_argument("--query-prefix", action="store_true",
                   help="prefix 'keywords </q>' to the model input")
    _add_common_flags(p)
    _add_embed_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("evaluate", help="intrinsic or extrinsic report")
    p.add_argument("--mode", required=True, choices=["intrinsic", "extrinsic"])
    p.add_argument("--corpus", required=True)
    p.add_argument("--kind", default="triad", choices=[k.value for k in CorpusKind])
    p.add_argument("--queries", help="query JSONL (required for intrinsic)")
    p.add_argument("--query-mode", default="evidence",
                   choices=["original", "evidence"])
    p.add_argument("--summarizer", default="extractive",
                   choices=["extractive", "bridge_file"])
    p.add_argument("--bridge-file", help="pre-generated summaries JSONL")
    p.add_argument("--extractive-k", type=int, default=2)
    p.add_argument("--cap", type=int, default=6)
    p.add_argument("--variants", help="comma-separated: R1,R2,RL,RSU4")
    p.add_argument("--report", required=True)
    p.add_argument("--audit", help="per-sample score JSONL")
    _add_common_flags(p)
    _add_embed_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline",
                       help="one-shot queries -> rank -> summarize -> rouge")
    p.add_argument("--config", help="pipeline config file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--query-mode", default="evidence",
                   choices=["original", "evidence"])
    p.add_argument("--report", required=True)
    p.add_argument("--audit", help="per-sample score JSONL")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, EmbeddingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
