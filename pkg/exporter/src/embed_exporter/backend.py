"""Loading a pretrained transformer and its tokenizer.

The model id can be anything AutoModel accepts, which in practice means a
local directory (saved with save_pretrained) or a hub identifier when the
machine has access to one.
"""

from __future__ import annotations

from .errors import ModelError

POOLINGS = ("mean",)


def check_pooling(pooling: str) -> None:
    if pooling not in POOLINGS:
        raise ModelError(
            f"unsupported pooling {pooling!r}; supported: {', '.join(POOLINGS)}"
        )


def load_backend(model_id: str):
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
    except Exception as exc:
        raise ModelError(f"cannot load tokenizer from {model_id!r}: {exc}") from exc
    if not getattr(tokenizer, "is_fast", False):
        raise ModelError(
            f"tokenizer for {model_id!r} is not a fast tokenizer; "
            "sub-word to word grouping needs word_ids support"
        )
    try:
        model = AutoModel.from_pretrained(model_id)
    except Exception as exc:
        raise ModelError(f"cannot load model from {model_id!r}: {exc}") from exc
    model.eval()
    return tokenizer, model
