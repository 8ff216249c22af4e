"""Pretrained-transformer sentence encoding with mean pooling.

The encoder runs in deterministic evaluation mode; sentence vectors average
the final-layer token states over non-padding positions. Sentences beyond the
model's position limit are truncated and counted.
"""

from __future__ import annotations

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

DEFAULT_MODEL = "allenai/scibert_scivocab_uncased"

# model_max_length is a sentinel of ~1e30 when the tokenizer carries no limit
_UNSET_LIMIT = 10**9


class SentenceEncoder:
    def __init__(self, model_name: str = DEFAULT_MODEL, device: str = "cpu", batch_size: int = 32):
        if batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        torch.manual_seed(0)
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name).to(device).eval()
        self.device = device
        self.batch_size = int(batch_size)
        limit = getattr(self.tokenizer, "model_max_length", None)
        if not limit or limit > _UNSET_LIMIT:
            limit = getattr(self.model.config, "max_position_embeddings", 512)
        self.max_tokens = int(limit)

    @property
    def dim(self) -> int:
        return int(self.model.config.hidden_size)

    def encode(self, texts) -> tuple[np.ndarray, int]:
        """Mean-pooled float32 vectors, one row per text in input order.

        Returns (vectors, truncated_count). Batching is fixed by batch_size,
        so identical input lists produce identical rows whether the encoder is
        exporting to a file or serving requests.
        """
        texts = list(texts)
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float32), 0
        rows = []
        truncated = 0
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            lengths = [len(ids) for ids in self.tokenizer(batch, truncation=False)["input_ids"]]
            truncated += sum(1 for n in lengths if n > self.max_tokens)
            encoded = self.tokenizer(
                batch,
                padding=True,
                truncation=True,
                max_length=self.max_tokens,
                return_tensors="pt",
            ).to(self.device)
            with torch.no_grad():
                hidden = self.model(**encoded).last_hidden_state
            mask = encoded["attention_mask"].unsqueeze(-1).to(hidden.dtype)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1.0)
            rows.append(pooled.cpu().numpy().astype(np.float32))
        return np.vstack(rows), truncated
