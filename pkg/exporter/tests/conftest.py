import os

import pytest
import torch
from tokenizers import BertWordPieceTokenizer
from transformers import BertConfig, BertModel, BertTokenizerFast

VOCAB = [
    "[PAD]",
    "[UNK]",
    "[CLS]",
    "[SEP]",
    "[MASK]",
    "the",
    "a",
    "patient",
    "has",
    "no",
    "heart",
    "failure",
    "pneumonia",
    "possible",
    "denies",
    "confirmed",
    "stable",
    "exam",
    "##s",
    "##ed",
]

MAX_POSITIONS = 24


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small randomly-initialized encoder saved to disk, loadable by name."""
    base = tmp_path_factory.mktemp("tinybert")
    vocab_path = os.path.join(base, "vocab.txt")
    with open(vocab_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(VOCAB) + "\n")
    wordpiece = BertWordPieceTokenizer(vocab=vocab_path, lowercase=True)
    tokenizer = BertTokenizerFast(tokenizer_object=wordpiece)
    tokenizer.model_max_length = MAX_POSITIONS

    torch.manual_seed(1234)
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=MAX_POSITIONS,
    )
    model = BertModel(config)
    model.eval()
    model_dir = os.path.join(base, "model")
    model.save_pretrained(model_dir)
    tokenizer.save_pretrained(model_dir)
    return model_dir
