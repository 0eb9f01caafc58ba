"""Shared builders for the test suite: tiny models and synthetic corpora."""

import numpy as np

from swde.corpus import Post
from swde.model import ModelDims, param_shapes, params_from_tensors
from swde.numerics import Tensor


def tiny_dims(**overrides) -> ModelDims:
    base = dict(
        char_vocab_size=8,
        k=3,
        l_char=5,
        d_char=4,
        channels=(3, 3, 4),
        widths=(2, 2, 2),
        d_h=3,
        d_a=3,
        d_t=3,
        d1=5,
        d2=4,
    )
    base.update(overrides)
    return ModelDims(**base)


def random_params(dims: ModelDims, seed: int = 0, scale: float = 0.2):
    """Arbitrary (not Glorot) parameters for layer-level tests."""
    rng = np.random.default_rng(seed)
    tensors = {}
    for name, shape in param_shapes(dims).items():
        arr = rng.normal(scale=scale, size=shape)
        if name == "char_embeddings":
            arr[0] = 0.0
        tensors[name] = Tensor(arr)
    return params_from_tensors(dims, tensors)


def zero_params(dims: ModelDims):
    tensors = {
        name: Tensor(np.zeros(shape)) for name, shape in param_shapes(dims).items()
    }
    return params_from_tensors(dims, tensors)


MARKERS = ["shocking", "unbelievable", "insane", "secret"]
NEUTRAL = ["report", "minutes", "budget", "schedule"]


def separable_posts(n: int = 64) -> list[Post]:
    """Half clickbait-marker titles, half neutral; trivially separable."""
    posts = []
    for i in range(n // 2):
        m = MARKERS[i % len(MARKERS)]
        posts.append(
            Post(
                id=f"p{i}",
                title=f"{m} reveal number {i} you must see",
                body=f"the {m} truth about item {i}",
                label=1,
            )
        )
    for i in range(n - n // 2):
        w = NEUTRAL[i % len(NEUTRAL)]
        posts.append(
            Post(
                id=f"n{i}",
                title=f"{w} filed for quarter {i} as planned",
                body=f"the {w} covers period {i}",
                label=0,
            )
        )
    return posts


def small_train_config(**overrides):
    from swde.trainer import TrainConfig

    base = dict(
        epochs=2,
        batch_size=8,
        seed=0,
        l_char=8,
        d_char=8,
        channels=(8, 8, 16),
        widths=(3, 3, 3),
        d_h=8,
        d_a=8,
        d_t=8,
        d1=16,
        d2=8,
        char_min_count=1,
        token_min_count=1,
        doc2vec_epochs=3,
    )
    base.update(overrides)
    return TrainConfig(**base)
