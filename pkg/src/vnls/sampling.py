"""Born-distribution samplers.

pi(x) = |psi(x)|^2 / <psi|psi> is sampled by single-bit-flip Metropolis
chains run in lockstep; beta(x) = |b(x)|^2 / <b|b> is sampled exactly by
inverse CDF over the nonzero support of the stored vector b.

Randomness is organized so runs are reproducible: every chain owns an
independent generator derived from (entropy, *prefix, chain) through
numpy's SeedSequence spawn keys, and all of a chain's draws happen in a
fixed order (start state, flip positions, acceptance uniforms).  Chains
are merged in chain order, never by completion time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def seed_seq(seed, *key):
    """SeedSequence for stream ``key`` under a base seed.

    ``seed`` is an int entropy value or a tuple (entropy, *prefix); the
    prefix and key become the spawn key, so distinct streams never collide.
    """
    if isinstance(seed, (tuple, list)):
        entropy, prefix = seed[0], tuple(int(v) for v in seed[1:])
    else:
        entropy, prefix = seed, ()
    return np.random.SeedSequence(int(entropy), spawn_key=prefix + key)


@dataclass
class ChainState:
    """End-of-run snapshot of one Metropolis chain."""

    x: int
    log_prob: float
    accepted: int
    proposed: int

    @property
    def acceptance(self):
        return self.accepted / self.proposed if self.proposed else 0.0


@dataclass
class SampleBatch:
    """Basis indices drawn from one distribution, with cached log psi."""

    indices: np.ndarray
    source: str  # "pi" or "beta"
    log_amps: np.ndarray

    def __len__(self):
        return self.indices.size


def metropolis_sample(psi, n, k, chains=8, burn_in=None, thin=None, seed=0):
    """Draw k samples of pi across ``chains`` single-bit-flip chains.

    A proposal flips one uniformly chosen bit and is accepted with
    probability min(1, |psi(x')/psi(x)|^2), evaluated in the log domain, so
    rescaling psi by a constant changes nothing.  burn_in defaults to 10*n
    sweeps (10*n*n flips).  thin defaults to about one sweep but is kept
    odd: a bit-flip walk alternates popcount parity whenever it moves, so
    an even interval would lock a rarely-rejecting chain onto a single
    parity class.  Returns (SampleBatch, [ChainState per chain]).
    """
    if burn_in is None:
        burn_in = 10 * n * n
    if thin is None:
        thin = n if n % 2 else n + 1
    if n < 1 or k < 0 or chains < 1 or burn_in < 0 or thin < 1:
        raise ValueError("bad sampler arguments")
    base = k // chains
    counts = [base] * chains
    counts[-1] += k - base * chains
    rngs = [np.random.default_rng(seed_seq(seed, c)) for c in range(chains)]

    size = 1 << n
    starts = np.empty(chains, dtype=np.int64)
    for c, rng in enumerate(rngs):
        x = int(rng.integers(0, size))
        tries = 0
        while psi.log_prob(x) == -np.inf:  # start on the support
            x = int(rng.integers(0, size))
            tries += 1
            if tries > 100_000:
                raise ValueError("could not find a state with nonzero amplitude")
        starts[c] = x

    chain_steps = np.array([burn_in + thin * ct for ct in counts], dtype=np.int64)
    steps = int(chain_steps.max())
    if steps:
        positions = np.stack([rng.integers(0, n, size=steps) for rng in rngs])
        uniforms = np.stack([rng.random(steps) for rng in rngs])
    xs = starts.copy()
    lp = np.asarray(psi.log_prob(xs), dtype=np.float64)
    accepted = np.zeros(chains, dtype=np.int64)
    max_count = max(counts)
    recorded = np.empty((chains, max_count), dtype=np.int64)

    with np.errstate(divide="ignore"):
        log_uniforms = np.log(uniforms) if steps else None
    for step in range(steps):
        active = step < chain_steps
        proposals = xs ^ (np.int64(1) << positions[:, step])
        prop_lp = np.asarray(psi.log_prob(proposals), dtype=np.float64)
        accept = (log_uniforms[:, step] < prop_lp - lp) & active
        xs = np.where(accept, proposals, xs)
        lp = np.where(accept, prop_lp, lp)
        accepted += accept
        offset = step - burn_in
        if offset >= 0 and offset % thin == thin - 1:
            recorded[:, offset // thin] = xs

    indices = np.concatenate(
        [recorded[c, :counts[c]] for c in range(chains)]) if k else np.zeros(0, np.int64)
    log_amps = (np.asarray(psi.log_amp(indices), dtype=np.complex128)
                if k else np.zeros(0, np.complex128))
    batch = SampleBatch(indices=indices, source="pi", log_amps=log_amps)
    states = [ChainState(int(xs[c]), float(lp[c]), int(accepted[c]),
                         int(chain_steps[c])) for c in range(chains)]
    return batch, states


def acceptance_stats(chain_states):
    """Mean acceptance ratio over chains."""
    if not chain_states:
        return 0.0
    return float(np.mean([cs.acceptance for cs in chain_states]))


def sample_beta(b, k, seed=0):
    """k exact draws from beta(x) = |b(x)|^2 / <b|b> for a DenseState b.

    Inverse-CDF over the nonzero support, so zero entries of b can never
    appear.  Raises if b has no nonzero entry.
    """
    amps = b.amplitudes
    support = np.flatnonzero(amps)
    if support.size == 0:
        raise ValueError("b has no nonzero entries")
    weights = np.abs(amps[support]) ** 2
    cdf = np.cumsum(weights)
    rng = np.random.default_rng(seed_seq(seed))
    u = rng.random(k) * cdf[-1]
    pos = np.minimum(np.searchsorted(cdf, u, side="right"), support.size - 1)
    indices = support[pos].astype(np.int64)
    return SampleBatch(indices=indices, source="beta",
                       log_amps=np.log(amps[indices]))
