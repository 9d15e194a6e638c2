"""Variational ground-state search on a transverse-field chain, checked exactly."""

import numpy as np

from vnls import (
    PauliSum,
    PauliTerm,
    TrainConfig,
    extremal_eigs,
    init_gaussian,
    train_vqmc,
)


def transverse_field_chain(n, g):
    terms = [PauliTerm(-1.0, {j: "Z", j + 1: "Z"}, n) for j in range(n - 1)]
    terms += [PauliTerm(-g, {j: "X"}, n) for j in range(n)]
    return PauliSum(terms, n)


def main():
    n, g = 8, 1.0
    h = transverse_field_chain(n, g)
    e0, _ = extremal_eigs(h)
    print(f"chain of {n} spins at g={g}, exact ground energy {e0:.6f}")

    psi = init_gaussian(n, alpha=2.0, sigma=0.05, seed=3, flavor="real")
    config = TrainConfig(epochs=200, batch_size=512, chains=8,
                         learning_rate=0.02, seed=3)
    records = train_vqmc(h, psi, config)

    for r in records[:: len(records) // 8]:
        print(f"epoch {r.epoch:4d}  energy {r.loss:+.5f}  "
              f"variance {r.loss_var:.2e}  acceptance {r.acceptance:.2f}")
    final = records[-1]
    print(f"final energy {final.loss:.6f} (error {final.loss - e0:.2e}, "
          f"{abs(final.loss - e0) / abs(e0):.2%} relative)")


if __name__ == "__main__":
    main()
