"""Draw spin configurations from a network wavefunction and check the histogram.

A short Metropolis walk per chain, then a comparison of the sampled
frequencies against the exact Born weights, which are enumerable at this
size.
"""

import numpy as np

from vnls import enumerate_born, init_gaussian, metropolis_sample


def main():
    n = 4
    psi = init_gaussian(n, sigma=0.4, seed=12, flavor="complex")

    k = 100_000
    batch, chains = metropolis_sample(psi, n, k, chains=8, seed=12)
    print(f"drew {len(batch)} samples over {len(chains)} chains")
    for i, c in enumerate(chains):
        print(f"  chain {i}: acceptance {c.acceptance:.3f}, ended at {c.x:04b}")

    support, weights = enumerate_born(psi)
    counts = np.bincount(batch.indices, minlength=1 << n)
    freq = counts / k
    exact = np.zeros(1 << n)
    exact[support] = weights

    tv = 0.5 * np.abs(freq - exact).sum()
    print(f"total variation distance to exact Born weights: {tv:.4f}")
    print(" x    exact   sampled")
    for x in np.argsort(exact)[::-1][:5]:
        print(f"{x:04b}  {exact[x]:.4f}   {freq[x]:.4f}")


if __name__ == "__main__":
    main()
