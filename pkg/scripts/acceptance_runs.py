"""Pre-builds the trained artifacts the acceptance suite consumes.

Running this is optional: the acceptance tests train on demand when the
cache is cold. It exists so the expensive runs can happen ahead of time
(e.g. overnight) instead of inside the first pytest invocation.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from helpers import corpus_path, speed_eval, train_cached  # noqa: E402

ABLATION_N = 40000
ABLATION_EPOCHS = 6


def log(msg):
    print(f"[{time.strftime('%H:%M:%S')}] {msg}", flush=True)


def main():
    log("ablation corpus")
    small_corpus = corpus_path(ABLATION_N, seed=13)

    for tag, kwargs in [
        ("ablate-baseline", dict(beta=10.0, use_sep=True)),
        ("ablate-nosep", dict(beta=10.0, use_sep=False)),
        ("ablate-beta1", dict(beta=1.0, use_sep=True)),
        ("ablate-beta20", dict(beta=20.0, use_sep=True)),
    ]:
        log(f"train {tag}")
        ckpt, out = train_cached(small_corpus, "small",
                                 epochs=ABLATION_EPOCHS, seed=13, tag=tag,
                                 **kwargs)
        sigma, eps, acc = speed_eval(ckpt, small_corpus)
        log(f"  {tag}: sigma_v={sigma:.5f} eps_v={eps:.5f} acc={acc:.4f}")

    log("main corpus (200k)")
    corpus = corpus_path(200_000, seed=11)
    log("train small 200k x 25 epochs (the long run)")
    ckpt, out = train_cached(corpus, "small", epochs=25, seed=11,
                             tag="small-main")
    sigma, eps, acc = speed_eval(ckpt, corpus)
    log(f"  main: sigma_v={sigma:.5f} eps_v={eps:.5f} acc={acc:.4f}")
    log("done")


if __name__ == "__main__":
    main()
