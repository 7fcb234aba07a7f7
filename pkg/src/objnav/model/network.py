"""Transformer encoder with mean pooling and affine output heads.

Forward and backward passes are written directly in numpy so gradients are
fully analytic and bit-reproducible for a fixed seed and thread count; the
finite-difference check in the metrics module validates them independently.
Architecture: token + learned positional embeddings, pre-norm self-attention
blocks with ReLU feedforwards, a final layernorm, masked mean pooling over
non-pad positions, and one affine head per output.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, VocabMismatchError
from .config import ModelConfig

_LN_EPS = 1e-5

_ALLOCATOR_TUNED = False


def tune_allocator() -> None:
    """Keep large numpy temporaries on the heap instead of per-use mmap.

    Activation-sized buffers exceed glibc's default mmap threshold, so every
    training step would otherwise pay page-fault plus zero-fill costs on each
    temporary; raising the thresholds roughly halves step time. No-op off
    glibc."""
    global _ALLOCATOR_TUNED
    if _ALLOCATOR_TUNED:
        return
    _ALLOCATOR_TUNED = True
    try:
        import ctypes

        libc = ctypes.CDLL("libc.so.6")
        m_trim_threshold, m_mmap_threshold = -1, -3
        libc.mallopt(m_mmap_threshold, 1 << 30)
        libc.mallopt(m_trim_threshold, 1 << 30)
    except (OSError, AttributeError):
        pass


def _dtype(config: ModelConfig):
    return np.float64 if config.dtype == "float64" else np.float32


def init_params(config: ModelConfig, vocab_size: int, seed: int
                ) -> dict[str, np.ndarray]:
    """Seeded parameter initialization (normal 0.02 for weights)."""
    rng = np.random.default_rng(seed)
    dt = _dtype(config)
    d, ff = config.feature_dim, config.feedforward_dim

    def w(*shape):
        return (rng.standard_normal(shape) * 0.02).astype(dt)

    def zeros(*shape):
        return np.zeros(shape, dtype=dt)

    def ones(*shape):
        return np.ones(shape, dtype=dt)

    p: dict[str, np.ndarray] = {
        "embed": w(vocab_size, d),
        "pos": w(config.max_seq_len, d),
        "ln_f.g": ones(d),
        "ln_f.b": zeros(d),
    }
    for i in range(config.layers):
        p[f"l{i}.ln1.g"] = ones(d)
        p[f"l{i}.ln1.b"] = zeros(d)
        p[f"l{i}.qkv.w"] = w(d, 3 * d)
        p[f"l{i}.qkv.b"] = zeros(3 * d)
        p[f"l{i}.attn_out.w"] = w(d, d)
        p[f"l{i}.attn_out.b"] = zeros(d)
        p[f"l{i}.ln2.g"] = ones(d)
        p[f"l{i}.ln2.b"] = zeros(d)
        p[f"l{i}.ff1.w"] = w(d, ff)
        p[f"l{i}.ff1.b"] = zeros(ff)
        p[f"l{i}.ff2.w"] = w(ff, d)
        p[f"l{i}.ff2.b"] = zeros(d)
    for name, _, size in config.output_heads:
        p[f"head.{name}.w"] = w(d, size)
        p[f"head.{name}.b"] = zeros(size)
    return p


def _layernorm(x, g, b):
    # einsum reductions avoid the strided-mean temporaries numpy would build
    n = x.shape[-1]
    mu = np.einsum("...d->...", x) / n
    xc = x - mu[..., None]
    var = np.einsum("...d,...d->...", xc, xc) / n
    inv = 1.0 / np.sqrt(var + _LN_EPS)
    xhat = xc
    xhat *= inv[..., None]
    y = xhat * g
    y += b
    return y, (xhat, inv)


def _layernorm_backward(dy, g, cache):
    xhat, inv = cache
    n = xhat.shape[-1]
    flat_axes = tuple(range(dy.ndim - 1))
    dg = np.einsum("nd,nd->d", dy.reshape(-1, n), xhat.reshape(-1, n))
    db = dy.sum(axis=flat_axes)
    dxhat = dy * g
    s1 = np.einsum("...d->...", dxhat)
    s2 = np.einsum("...d,...d->...", dxhat, xhat)
    dx = dxhat
    dx *= n
    dx -= s1[..., None]
    dx -= xhat * s2[..., None]
    dx *= (inv / n)[..., None]
    return dx, dg, db


def _softmax(scores):
    m = scores.max(axis=-1, keepdims=True)
    e = np.exp(scores - m)
    return e / e.sum(axis=-1, keepdims=True)


def _softmax_inplace(scores):
    m = scores.max(axis=-1, keepdims=True)
    scores -= m
    np.exp(scores, out=scores)
    scores /= scores.sum(axis=-1, keepdims=True)
    return scores


def _segment_sum(ids: np.ndarray, rows: np.ndarray, num_segments: int
                 ) -> np.ndarray:
    """Sum `rows` into per-id buckets (sort + reduceat; faster than add.at)."""
    order = np.argsort(ids, kind="stable")
    sorted_ids = ids[order]
    boundaries = np.flatnonzero(np.diff(sorted_ids)) + 1
    starts = np.concatenate(([0], boundaries))
    sums = np.add.reduceat(rows[order], starts, axis=0)
    out = np.zeros((num_segments, rows.shape[1]), dtype=rows.dtype)
    out[sorted_ids[starts]] = sums
    return out


class Model:
    """Parameter container with forward / loss / backward methods."""

    def __init__(self, config: ModelConfig, vocab_size: int,
                 params: dict[str, np.ndarray] | None = None, seed: int = 0):
        tune_allocator()
        self.config = config
        self.vocab_size = vocab_size
        self.params = params if params is not None else init_params(
            config, vocab_size, seed)
        self._drop_rng = np.random.default_rng(seed + 1)

    # ---------------------------------------------------------------- forward

    def forward(self, tokens: np.ndarray, train: bool = False):
        """Run the encoder; returns (outputs, cache).

        tokens: (B, max_seq_len) int array, [PAD]=0. Trailing all-pad columns
        are trimmed before compute; masked attention and masked pooling make
        the trim exact.
        """
        cfg = self.config
        if tokens.ndim != 2 or tokens.shape[1] != cfg.max_seq_len:
            raise ConfigError(
                f"tokens shape {tokens.shape} incompatible with max_seq_len "
                f"{cfg.max_seq_len}"
            )
        if int(tokens.max(initial=0)) >= self.vocab_size:
            raise VocabMismatchError(
                f"token id {int(tokens.max())} outside vocabulary of "
                f"{self.vocab_size}"
            )
        p = self.params
        dt = _dtype(cfg)
        nonpad_full = tokens != 0
        lengths = nonpad_full.sum(axis=1)
        L = max(1, int(lengths.max(initial=1)))
        toks = tokens[:, :L]
        nonpad = nonpad_full[:, :L]
        B = toks.shape[0]
        H, dh = cfg.heads, cfg.head_dim
        scale = 1.0 / np.sqrt(dh)

        # additive key mask: pad keys contribute nothing to any query
        kmask = np.where(nonpad, 0.0, -1e9).astype(dt)[:, None, None, :]

        x = p["embed"][toks] + p["pos"][:L]
        cache: dict = {"tokens": toks, "nonpad": nonpad, "L": L, "drops": {}}
        x = self._dropout(x, train, cache, "embed")

        for i in range(cfg.layers):
            lc: dict = {}
            h, lc["ln1"] = _layernorm(x, p[f"l{i}.ln1.g"], p[f"l{i}.ln1.b"])
            qkv = h @ p[f"l{i}.qkv.w"]
            qkv += p[f"l{i}.qkv.b"]
            q, k, v = np.split(qkv, 3, axis=-1)
            # (B, L, d) -> (B, H, L, dh)
            q = q.reshape(B, L, H, dh).transpose(0, 2, 1, 3)
            k = k.reshape(B, L, H, dh).transpose(0, 2, 1, 3)
            v = v.reshape(B, L, H, dh).transpose(0, 2, 1, 3)
            scores = q @ k.transpose(0, 1, 3, 2)
            scores *= scale
            scores += kmask
            attn = _softmax_inplace(scores)
            ctx = (attn @ v).transpose(0, 2, 1, 3).reshape(B, L, -1)
            lc.update(h=h, q=q, k=k, v=v, attn=attn, ctx=ctx)
            out = ctx @ p[f"l{i}.attn_out.w"]
            out += p[f"l{i}.attn_out.b"]
            out = self._dropout(out, train, cache, f"l{i}.attn")
            x += out  # x is step-local; the residual input is never reread

            h2, lc["ln2"] = _layernorm(x, p[f"l{i}.ln2.g"], p[f"l{i}.ln2.b"])
            f1 = h2 @ p[f"l{i}.ff1.w"]
            f1 += p[f"l{i}.ff1.b"]
            relu = np.maximum(f1, 0.0, out=f1)
            f2 = relu @ p[f"l{i}.ff2.w"]
            f2 += p[f"l{i}.ff2.b"]
            f2 = self._dropout(f2, train, cache, f"l{i}.ff")
            lc.update(h2=h2, relu=relu)
            x += f2
            cache[f"layer{i}"] = lc

        xf, cache["ln_f"] = _layernorm(x, p["ln_f.g"], p["ln_f.b"])
        cache["ln_f_in"] = x
        counts = np.maximum(lengths.astype(dt), 1.0)
        pooled = (xf * nonpad[..., None]).sum(axis=1) / counts[:, None]
        cache.update(xf=xf, pooled=pooled, counts=counts)

        outputs: dict[str, np.ndarray] = {}
        for name, kind, _ in cfg.output_heads:
            z = pooled @ p[f"head.{name}.w"] + p[f"head.{name}.b"]
            outputs[name] = _softmax(z) if kind == "classify" else z
        cache["outputs"] = outputs
        return outputs, cache

    def _dropout(self, x, train, cache, key):
        rate = self.config.dropout
        if not train or rate <= 0.0:
            return x
        draw_dtype = np.float64 if x.dtype == np.float64 else np.float32
        mask = (self._drop_rng.random(x.shape, dtype=draw_dtype) >= rate) \
            .astype(x.dtype)
        mask *= 1.0 / (1.0 - rate)
        cache["drops"][key] = mask
        x = x * mask
        return x

    # ------------------------------------------------------------------- loss

    def loss_and_grads(self, tokens, targets: dict[str, np.ndarray],
                       beta: float = 10.0, train: bool = True):
        """Total loss (beta-weighted motion MSE plus the state
        cross-entropies) and analytic gradients for every parameter.

        `targets` is keyed by head name: regression heads take float arrays,
        classification heads take integer labels.
        """
        outputs, cache = self.forward(tokens, train=train)
        losses, dheads = head_losses_and_grads(self.config, outputs, targets, beta)
        grads = self.backward(dheads, cache)
        return losses, grads, outputs

    # --------------------------------------------------------------- backward

    def backward(self, dheads: dict[str, np.ndarray], cache) -> dict[str, np.ndarray]:
        cfg = self.config
        p = self.params
        toks, nonpad, L = cache["tokens"], cache["nonpad"], cache["L"]
        B = toks.shape[0]
        H, dh = cfg.heads, cfg.head_dim
        scale = 1.0 / np.sqrt(dh)
        grads: dict[str, np.ndarray] = {}

        pooled = cache["pooled"]
        dpooled = np.zeros_like(pooled)
        for name, _, _ in cfg.output_heads:
            dz = dheads[name]
            grads[f"head.{name}.w"] = pooled.T @ dz
            grads[f"head.{name}.b"] = dz.sum(axis=0)
            dpooled += dz @ p[f"head.{name}.w"].T

        counts = cache["counts"]
        dxf = (dpooled / counts[:, None])[:, None, :] * nonpad[..., None]
        dx, dg, db = _layernorm_backward(dxf, p["ln_f.g"], cache["ln_f"])
        grads["ln_f.g"], grads["ln_f.b"] = dg, db

        drops = cache["drops"]
        for i in reversed(range(cfg.layers)):
            lc = cache[f"layer{i}"]
            # feedforward block
            df2 = dx * drops[f"l{i}.ff"] if f"l{i}.ff" in drops else dx
            grads[f"l{i}.ff2.w"] = lc["relu"].reshape(-1, cfg.feedforward_dim).T @ \
                df2.reshape(-1, cfg.feature_dim)
            grads[f"l{i}.ff2.b"] = df2.sum(axis=(0, 1))
            df1 = df2 @ p[f"l{i}.ff2.w"].T
            df1 *= lc["relu"] > 0.0
            grads[f"l{i}.ff1.w"] = lc["h2"].reshape(-1, cfg.feature_dim).T @ \
                df1.reshape(-1, cfg.feedforward_dim)
            grads[f"l{i}.ff1.b"] = df1.sum(axis=(0, 1))
            dh2 = df1 @ p[f"l{i}.ff1.w"].T
            dres, dg, db = _layernorm_backward(dh2, p[f"l{i}.ln2.g"], lc["ln2"])
            grads[f"l{i}.ln2.g"], grads[f"l{i}.ln2.b"] = dg, db
            dres += dx
            dx = dres

            # attention block
            dout = dx * drops[f"l{i}.attn"] if f"l{i}.attn" in drops else dx
            grads[f"l{i}.attn_out.w"] = lc["ctx"].reshape(-1, cfg.feature_dim).T @ \
                dout.reshape(-1, cfg.feature_dim)
            grads[f"l{i}.attn_out.b"] = dout.sum(axis=(0, 1))
            dctx = (dout @ p[f"l{i}.attn_out.w"].T).reshape(B, L, H, dh) \
                .transpose(0, 2, 1, 3)
            attn, q, k, v = lc["attn"], lc["q"], lc["k"], lc["v"]
            dattn = dctx @ v.transpose(0, 1, 3, 2)
            dv = attn.transpose(0, 1, 3, 2) @ dctx
            # softmax backward in place: dattn becomes dscores
            dattn -= (dattn * attn).sum(axis=-1, keepdims=True)
            dattn *= attn
            dscores = dattn
            dq = (dscores @ k) * scale
            dk = (dscores.transpose(0, 1, 3, 2) @ q) * scale
            dqkv = np.concatenate(
                [t.transpose(0, 2, 1, 3).reshape(B, L, -1) for t in (dq, dk, dv)],
                axis=-1,
            )
            grads[f"l{i}.qkv.w"] = lc["h"].reshape(-1, cfg.feature_dim).T @ \
                dqkv.reshape(-1, 3 * cfg.feature_dim)
            grads[f"l{i}.qkv.b"] = dqkv.sum(axis=(0, 1))
            dh_in = dqkv @ p[f"l{i}.qkv.w"].T
            dres, dg, db = _layernorm_backward(dh_in, p[f"l{i}.ln1.g"], lc["ln1"])
            grads[f"l{i}.ln1.g"], grads[f"l{i}.ln1.b"] = dg, db
            dres += dx
            dx = dres

        if "embed" in drops:
            dx = dx * drops["embed"]
        grads["pos"] = np.zeros_like(p["pos"])
        grads["pos"][:L] = dx.sum(axis=0)
        grads["embed"] = _segment_sum(toks.ravel(), dx.reshape(-1, cfg.feature_dim),
                                      self.vocab_size)
        return grads


def head_losses_and_grads(config: ModelConfig, outputs,
                          targets: dict[str, np.ndarray], beta: float):
    """Per-head losses and the gradients w.r.t. each head's pre-activation."""
    from .losses import motion_loss_grad, state_loss_grad

    losses: dict[str, float] = {}
    dheads: dict[str, np.ndarray] = {}
    for name, kind, _ in config.output_heads:
        t = targets[name]
        if kind == "regression":
            losses[name], dheads[name] = motion_loss_grad(outputs[name], t, beta)
        else:
            losses[name], dheads[name] = state_loss_grad(outputs[name], t)
    losses["total"] = float(sum(losses.values()))
    return losses, dheads


class AdamW:
    """Decoupled-weight-decay Adam. Decay applies to matrices only (weights
    and embeddings), never to biases or layernorm parameters."""

    def __init__(self, params: dict[str, np.ndarray], lr: float = 1e-4,
                 betas: tuple[float, float] = (0.9, 0.999), eps: float = 1e-8,
                 weight_decay: float = 0.01):
        self.lr = lr
        self.b1, self.b2 = betas
        self.eps = eps
        self.weight_decay = weight_decay
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]):
        self.t += 1
        bc1 = 1.0 - self.b1 ** self.t
        bc2 = 1.0 - self.b2 ** self.t
        for key, g in grads.items():
            m = self.m[key]
            v = self.v[key]
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * (g * g)
            update = (m / bc1) / (np.sqrt(v / bc2) + self.eps)
            if self.weight_decay and params[key].ndim >= 2:
                update = update + self.weight_decay * params[key]
            params[key] -= self.lr * update
