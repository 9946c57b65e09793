"""divan: unsupervised analysis toolkit for Persian poetry corpora.

Pipeline surface: corpus loading, text preprocessing, bag-of-words and
trigram features with cosine similarity, Gibbs-sampled topic models,
mean-pooled token embeddings fused through an autoencoder, k-means
clustering with PCA projection, and deterministic SVG/CSV reports.
"""

from .cluster import ClusterAssignment, Projection2D, kmeans, pca_project
from .corpus import Book, Corpus, Poem, StopwordSet, load_corpus, load_stopwords
from .embed import (
    EmbeddingTable,
    HashEmbeddingProvider,
    PoemEmbedding,
    hash_provider,
    load_embedding_table,
    poem_embedding,
    save_embedding_table,
)
from .errors import DataError, DivanError, DivergenceError, PipelineError
from .features import (
    FeatureVector,
    SimilarityMatrix,
    Vocabulary,
    build_trigram_vocabulary,
    build_vocabulary,
    cosine_similarity,
    extract_trigrams,
    similarity_matrix,
    term_frequencies,
    top_k_bow,
    trigram_bow,
)
from .fuse import (
    Autoencoder,
    FusedLatent,
    FusionInput,
    build_fusion_input,
    encode,
    train_autoencoder,
)
from .report import ReportBundle, RunConfig, run_pipeline
from .textprep import (
    PrepConfig,
    TokenizedPoem,
    normalize,
    preprocess_poem,
    reduce_token,
    remove_stopwords,
    stem,
    tokenize,
)
from .topics import LdaConfig, TopicModel, doc_topic_vector, fit_lda, log_likelihood, topic_top_words

__version__ = "0.1.0"
