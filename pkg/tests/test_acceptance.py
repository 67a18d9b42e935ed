"""Acceptance suite: one test per release criterion.

Each test prints a single PASS line on success (run with -s or check the
captured output); tolerances and runtime budgets are pinned here, not
configurable.
"""
import json
import random
import time
from collections import Counter
from functools import lru_cache
from pathlib import Path

import pytest

from qfsforge.cli import EXIT_OK, main
from qfsforge.config import PipelineConfig
from qfsforge.corpus import Corpus, CorpusKind, CorpusSample, load_corpus, write_corpus
from qfsforge.embed import EmbeddingProvider, cosine_similarity, embed_text
from qfsforge.evalsuite import intrinsic_similarity, run_extrinsic
from qfsforge.evidence import EvidenceQuery, extract_evidence
from qfsforge.rank import build_model_input, rank_sentences
from qfsforge.rouge import rouge_l, rouge_n, rouge_su4, score_pair
from qfsforge.textnorm import content_norms, split_sentences

FIXTURES = Path(__file__).parent / "fixtures"

WORD_POOL = [
    "asthma", "chronic", "disease", "affects", "air", "lung", "cancer",
    "exercise", "the", "a", "of", "and", "weather", "treatment", "cell",
    "memory", "salt", "obesity", "index", "smoking", "therapy", "doctor",
]


def ok(name):
    print(f"ACCEPTANCE {name}: PASS")


class TestEvidenceOracle:
    def test_evidence_oracle_equivalence(self):
        """1,000 random (document, summary) pairs match brute force exactly."""
        rng = random.Random(101)
        start = time.monotonic()
        for _ in range(1000):
            document = " ".join(rng.choices(WORD_POOL, k=rng.randint(1, 60)))
            summary = " ".join(rng.choices(WORD_POOL, k=rng.randint(1, 25)))
            cap = rng.randint(1, 8)
            got = list(extract_evidence(document, summary, cap=cap).keywords)

            # independent oracle: brute-force normalized-token-set intersection
            doc_norms = content_norms(document)
            common = set(doc_norms) & set(content_norms(summary))
            expected = []
            for w in doc_norms:
                if w in common and w not in expected:
                    expected.append(w)
            assert got == expected[:cap]
            assert len(got) <= cap
            assert len(set(got)) == len(got)
        elapsed = time.monotonic() - start
        assert elapsed < 10.0, f"evidence oracle suite took {elapsed:.1f}s"
        ok("evidence-oracle-equivalence")


class TestRougeHandValues:
    def test_hand_value_suite(self):
        """The nine fixed examples for R-1/R-2/R-L/R-SU4, to 1e-6."""
        tol = 1e-6
        s = rouge_n(["a", "b", "c"], ["a", "b", "c"], 1)
        assert abs(s.f1 - 1.0) < tol
        s = rouge_n(["the", "cat", "sat"], ["the", "cat"], 1)
        assert abs(s.precision - 2 / 3) < tol and abs(s.recall - 1.0) < tol
        assert abs(s.f1 - 0.8) < tol
        s = rouge_n(["cat", "cat", "cat"], ["cat"], 1)
        assert abs(s.precision - 1 / 3) < tol and abs(s.recall - 1.0) < tol

        s = rouge_l(["x", "y"], ["x", "y"])
        assert abs(s.f1 - 1.0) < tol
        s = rouge_l(["the", "cat", "sat", "on", "mat"], ["cat", "on", "the", "mat"])
        assert abs(s.precision - 0.6) < tol and abs(s.recall - 0.75) < tol
        assert abs(s.f1 - 2 / 3) < tol
        s = rouge_l(["a", "b"], ["c", "d"])
        assert s.f1 == 0.0

        s = rouge_su4(["q", "r"], ["q", "r"])
        assert abs(s.f1 - 1.0) < tol
        s = rouge_su4(["a", "b"], ["a", "b"])
        assert abs(s.precision - 1.0) < tol and abs(s.recall - 1.0) < tol
        s = rouge_su4(["a", "b", "c"], ["a", "c"])
        assert abs(s.precision - 0.5) < tol and abs(s.recall - 1.0) < tol
        assert abs(s.f1 - 2 / 3) < tol
        ok("rouge-hand-values")

    def test_property_suite_10k(self):
        """Bounds, identity, harmonic identity, brute-force LCS, 10,000 cases."""
        rng = random.Random(202)
        vocab = "abcd"
        start = time.monotonic()

        @lru_cache(maxsize=None)
        def brute_lcs(a, b):
            if not a or not b:
                return 0
            if a[-1] == b[-1]:
                return 1 + brute_lcs(a[:-1], b[:-1])
            return max(brute_lcs(a[:-1], b), brute_lcs(a, b[:-1]))

        for case in range(10_000):
            a = tuple(rng.choices(vocab, k=rng.randint(0, 8)))
            b = tuple(rng.choices(vocab, k=rng.randint(0, 8)))
            for variant in ("R1", "R2", "RL", "RSU4"):
                s = score_pair(a, b, variant)
                assert 0.0 <= s.precision <= 1.0
                assert 0.0 <= s.recall <= 1.0
                assert 0.0 <= s.f1 <= 1.0
                if s.precision + s.recall > 0:
                    expected = 2 * s.precision * s.recall / (s.precision + s.recall)
                    assert abs(s.f1 - expected) < 1e-9
                else:
                    assert s.f1 == 0.0
            if a:
                assert abs(score_pair(a, a, "R1").f1 - 1.0) < 1e-9
                assert abs(score_pair(a, a, "RL").f1 - 1.0) < 1e-9
                assert abs(score_pair(a, a, "RSU4").f1 - 1.0) < 1e-9
            s = rouge_l(a, b)
            lcs = brute_lcs(a, b)
            if a and b:
                assert abs(s.precision - lcs / len(a)) < 1e-12
                assert abs(s.recall - lcs / len(b)) < 1e-12
        elapsed = time.monotonic() - start
        assert elapsed < 30.0, f"rouge property suite took {elapsed:.1f}s"
        ok("rouge-property-suite")


class TestRankingInvariants:
    def test_invariants_1000_documents(self):
        rng = random.Random(303)
        provider = EmbeddingProvider.hash_fallback(dimension=16, seed=11)
        vocab = ["apple", "bridge", "cloud", "delta", "ember", "frost",
                 "grain", "haze", "iris", "jade"]
        start = time.monotonic()
        for _ in range(1000):
            n_sent = rng.randint(1, 6)
            sentences = []
            for _ in range(n_sent):
                words = rng.choices(vocab, k=rng.randint(1, 7))
                sentences.append(" ".join(words).capitalize() + ".")
            document = " ".join(sentences)
            keywords = tuple(rng.sample(vocab, k=2))
            query = EvidenceQuery(keywords=keywords, source="pair_oracle")

            ranked = rank_sentences(document, query, provider)

            # permutation of the split sentences
            split = [s.text for s in split_sentences(document)]
            assert Counter(e.text for e in ranked.entries) == Counter(split)

            # monotone with stable ties
            for prev, curr in zip(ranked.entries, ranked.entries[1:]):
                assert prev.similarity >= curr.similarity
                if prev.similarity == curr.similarity:
                    assert prev.orig_index < curr.orig_index

            # budget prefix
            small = build_model_input(ranked, query, budget=5)
            large = build_model_input(ranked, query, budget=20)
            assert large.startswith(small)

            # positive scaling of the query vector leaves the permutation
            qv = embed_text(provider, keywords)
            scaled = [
                (
                    cosine_similarity(
                        qv.components * 3.5,
                        embed_text(provider, content_norms(s.text)).components,
                    ),
                    s.index,
                )
                for s in split_sentences(document)
            ]
            manual = [i for _, i in sorted(scaled, key=lambda p: (-p[0], p[1]))]
            assert manual == [e.orig_index for e in ranked.entries]
        elapsed = time.monotonic() - start
        assert elapsed < 20.0, f"ranking invariant suite took {elapsed:.1f}s"
        ok("ranking-invariants")


def degenerate_corpus(n=50):
    """First sentence of each document equals its gold summary."""
    fillers = ["Extra filler text follows.", "More unrelated words continue.",
               "Trailing padding sentence ends."]
    samples = []
    for i in range(n):
        lead = f"Sample number {i} carries unique fact {i * 7}."
        samples.append(CorpusSample(
            sample_id=f"d{i}",
            document=" ".join([lead] + fillers),
            summary=lead,
            original_query="",
        ))
    return Corpus(samples=tuple(samples), kind=CorpusKind.TRIAD, name="degenerate")


class TestEndToEndDegenerate:
    def test_pipeline_perfect_rouge(self, tmp_path):
        start = time.monotonic()
        corpus_path = tmp_path / "degenerate.jsonl"
        write_corpus(degenerate_corpus(50), corpus_path)
        cfg = tmp_path / "cfg"
        cfg.write_text("extractive_k = 1\nrouge_variants = R1,R2,RL\n")
        report_path = tmp_path / "report.json"
        code = main(["pipeline", "--config", str(cfg), "--corpus", str(corpus_path),
                     "--query-mode", "original", "--report", str(report_path)])
        assert code == EXIT_OK
        report = json.loads(report_path.read_text())
        for variant in ("R1", "R2", "RL"):
            assert report["rouge"][variant]["f1"] == 1.0
        elapsed = time.monotonic() - start
        assert elapsed < 5.0, f"degenerate pipeline took {elapsed:.1f}s"
        ok("end-to-end-degenerate")


def separation_corpus(n=20, seed=404):
    """Evidence keywords appear only in the summary-bearing sentence;
    original queries are distractor words absent from every document."""
    rng = random.Random(seed)
    filler_vocab = ["stone", "river", "meadow", "copper", "lantern", "harbor",
                    "timber", "saddle", "mirror", "velvet"]
    keyword_vocab = ["asthma", "obesity", "dementia", "carcinoma", "fibrosis",
                     "sepsis", "anemia", "eczema", "arthritis", "migraine"]
    distractors = ["quasar", "nebula", "photon", "glacier", "typhoon"]
    samples = []
    for i in range(n):
        keywords = rng.sample(keyword_vocab, k=3)
        bearing = " ".join(keywords).capitalize() + f" marks record {i}."
        sentences = [
            " ".join(rng.choices(filler_vocab, k=5)).capitalize() + "."
            for _ in range(4)
        ]
        pos = rng.randrange(len(sentences) + 1)
        sentences.insert(pos, bearing)
        samples.append(CorpusSample(
            sample_id=f"sep{i}",
            document=" ".join(sentences),
            summary=bearing,
            original_query=" ".join(rng.sample(distractors, k=2)),
        ))
    return Corpus(samples=tuple(samples), kind=CorpusKind.TRIAD, name="separation")


class TestEvidenceVsDistractor:
    def test_separation_gap(self):
        corpus = separation_corpus()
        provider = EmbeddingProvider.hash_fallback(dimension=32, seed=0)
        config = PipelineConfig(extractive_k=1, rouge_variants=("R1",))
        evidence_report = run_extrinsic(corpus, "evidence", provider, config=config)
        distractor_report = run_extrinsic(corpus, "original", provider, config=config)
        gap = evidence_report.rouge["R1"].f1 - distractor_report.rouge["R1"].f1
        assert gap >= 0.05, f"evidence-vs-distractor gap {gap:.3f} < 0.05"
        ok("evidence-vs-distractor-separation")


class TestIntrinsicSanity:
    def test_matched_beats_shuffled_with_vector_file(self):
        corpus = load_corpus(FIXTURES / "tdqfs_table5.jsonl", "clustered")
        provider = EmbeddingProvider.from_vector_file(FIXTURES / "vectors_table5.txt")
        queries = {}
        with (FIXTURES / "tdqfs_table5_queries.jsonl").open() as f:
            for line in f:
                obj = json.loads(line)
                queries[obj["sample_id"]] = EvidenceQuery(
                    keywords=tuple(obj["keywords"]),
                    source="bridge_generated",
                    sample_id=obj["sample_id"],
                )
        matched = intrinsic_similarity(corpus, queries, provider).mean_similarity

        rng = random.Random(505)
        ids = [s.sample_id for s in corpus]
        baselines = []
        for _ in range(20):
            shuffled_ids = ids[:]
            rng.shuffle(shuffled_ids)
            shuffled = {
                orig: EvidenceQuery(
                    keywords=queries[other].keywords,
                    source="bridge_generated",
                    sample_id=orig,
                )
                for orig, other in zip(ids, shuffled_ids)
            }
            baselines.append(
                intrinsic_similarity(corpus, shuffled, provider).mean_similarity
            )
        baseline = sum(baselines) / len(baselines)
        assert matched > baseline, (
            f"matched mean {matched:.4f} not above shuffled baseline {baseline:.4f}"
        )
        ok("intrinsic-similarity-sanity (vector file)")

    def test_hash_fallback_runs_finite(self, table5_corpus, table5_queries):
        provider = EmbeddingProvider.hash_fallback(dimension=64, seed=0)
        report = intrinsic_similarity(table5_corpus, table5_queries, provider)
        assert len(report.per_sample) == 40
        assert all(-1.0 <= sim <= 1.0 for _, sim in report.per_sample)
        ok("intrinsic-similarity-sanity (hash fallback)")


class TestDeterminism:
    def test_all_commands_rerun_identical_and_jobs_invariant(self, tmp_path):
        corpus = separation_corpus()
        corpus_path = tmp_path / "sep.jsonl"
        write_corpus(corpus, corpus_path)

        def run(args, out):
            assert main(args) == EXIT_OK
            return out.read_bytes()

        # extract-evidence rerun
        a = run(["extract-evidence", "--corpus", str(corpus_path), "--kind", "triad",
                 "--out", str(tmp_path / "ev1.jsonl")], tmp_path / "ev1.jsonl")
        b = run(["extract-evidence", "--corpus", str(corpus_path), "--kind", "triad",
                 "--out", str(tmp_path / "ev2.jsonl")], tmp_path / "ev2.jsonl")
        assert a == b

        # gen-query, jobs 1 vs 8
        g1 = run(["gen-query", "--corpus", str(corpus_path), "--kind", "triad",
                  "--mode", "document-only", "--jobs", "1",
                  "--out", str(tmp_path / "q1.jsonl")], tmp_path / "q1.jsonl")
        g8 = run(["gen-query", "--corpus", str(corpus_path), "--kind", "triad",
                  "--mode", "document-only", "--jobs", "8",
                  "--out", str(tmp_path / "q8.jsonl")], tmp_path / "q8.jsonl")
        assert g1 == g8

        # rank, jobs 1 vs 8
        (tmp_path / "q.jsonl").write_bytes(g1)
        r1 = run(["rank", "--corpus", str(corpus_path), "--kind", "triad",
                  "--queries", str(tmp_path / "q.jsonl"), "--jobs", "1",
                  "--out", str(tmp_path / "r1.jsonl")], tmp_path / "r1.jsonl")
        r8 = run(["rank", "--corpus", str(corpus_path), "--kind", "triad",
                  "--queries", str(tmp_path / "q.jsonl"), "--jobs", "8",
                  "--out", str(tmp_path / "r8.jsonl")], tmp_path / "r8.jsonl")
        assert r1 == r8

        # evaluate extrinsic rerun
        e1 = run(["evaluate", "--mode", "extrinsic", "--corpus", str(corpus_path),
                  "--kind", "triad", "--report", str(tmp_path / "e1.json")],
                 tmp_path / "e1.json")
        e2 = run(["evaluate", "--mode", "extrinsic", "--corpus", str(corpus_path),
                  "--kind", "triad", "--report", str(tmp_path / "e2.json")],
                 tmp_path / "e2.json")
        assert e1 == e2

        # pipeline rerun
        p1 = run(["pipeline", "--corpus", str(corpus_path),
                  "--report", str(tmp_path / "p1.json")], tmp_path / "p1.json")
        p2 = run(["pipeline", "--corpus", str(corpus_path),
                  "--report", str(tmp_path / "p2.json")], tmp_path / "p2.json")
        assert p1 == p2
        ok("determinism")
