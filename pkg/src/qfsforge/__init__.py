"""qfs-forge: evidence-based queries, sentence ranking, and ROUGE evaluation
for query-focused summarization corpora."""

from .corpus import Corpus, CorpusError, CorpusKind, CorpusSample, load_corpus, write_corpus
from .embed import EmbeddingProvider, TextVector, cosine_similarity, embed_text, hash_fallback_vector
from .evidence import (
    DocumentFrequencyTable,
    EvidenceQuery,
    build_df_table,
    extract_evidence,
    export_training_pairs,
    generate_query_document_only,
)
from .rank import RankedDocument, RankedSentence, build_model_input, extractive_summary, rank_sentences
from .rouge import RougeScore, corpus_rouge, rouge_l, rouge_n, rouge_su4
from .textnorm import SentenceList, Token, filter_stopwords, split_sentences, tokenize

__version__ = "0.1.0"
