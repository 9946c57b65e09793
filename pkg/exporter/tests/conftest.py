from pathlib import Path

import pytest

import divan
from divan.textprep import preprocess_poem

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA_DIR / "fixture_corpus"


def distinct_tokens(corpus_path):
    """Distinct post-preprocessing tokens, exactly as the primary pipeline sees them."""
    corpus = divan.load_corpus(corpus_path)
    prep = divan.PrepConfig(stopwords=divan.load_stopwords())
    tokens = set()
    for book in corpus.books:
        for poem in book.poems:
            tokens.update(preprocess_poem(poem, prep).flat_tokens)
    return tokens


@pytest.fixture(scope="session")
def fixture_tokens():
    return sorted(distinct_tokens(FIXTURE_CORPUS))


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory, fixture_tokens):
    """A local randomly-initialized 768-dim BERT plus a WordPiece vocab.

    Small enough to build in seconds, big enough in hidden size to match
    the real encoder's output dimension.  No network involved.
    """
    import torch
    from transformers import BertConfig, BertModel, BertTokenizerFast

    path = tmp_path_factory.mktemp("tiny-persian-bert")
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", *fixture_tokens]
    (path / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tokenizer = BertTokenizerFast(vocab_file=str(path / "vocab.txt"), do_lower_case=False)
    tokenizer.model_max_length = 64
    tokenizer.save_pretrained(path)

    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=768,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=512,
        max_position_embeddings=64,
    )
    BertModel(config).save_pretrained(path)
    return path
