"""Dense reference integrator on the full (unblocked) density matrix."""

from typing import List, Tuple

import numpy as np
from scipy.linalg import eigh

from src.dynamics.system import ClusterSystem
from src.operators.hamiltonian import hamiltonian_matrix


class DenseEvolution:
    """
    The same two-step scheme as the block integrator, on n x n matrices.

    Only for small spaces; used to check that the block decomposition
    changes nothing.
    """

    def __init__(self, system: ClusterSystem):
        self.system = system
        self.space = system.space
        n = len(system.space)
        self.hamiltonian = hamiltonian_matrix(system.space, system.config.params).toarray()
        self.channels: List[Tuple[float, np.ndarray]] = []
        self.loss = np.zeros((n, n))
        for op in system.operators:
            a = op.matrix.toarray()
            if op.gamma > 0:
                self.channels.append((op.gamma, a))
                self.loss += op.gamma * a.T @ a
            if op.inflow_rate > 0:
                self.channels.append((op.inflow_rate, a.T))
                self.loss += op.inflow_rate * a @ a.T
        self.energies, self.transform = eigh(self.hamiltonian)

    def initial_state(self) -> np.ndarray:
        n = len(self.space)
        rho = np.zeros((n, n), dtype=np.complex128)
        i = self.space.initial_index
        rho[i, i] = 1.0
        return rho

    def propagator(self, dt: float) -> np.ndarray:
        v = self.transform
        return (v * np.exp(-1j * self.energies * dt / self.system.hbar)) @ v.conj().T

    def step(self, rho: np.ndarray, u: np.ndarray, dt: float) -> np.ndarray:
        rho = u @ rho @ u.conj().T
        drho = -0.5 * (self.loss @ rho + rho @ self.loss)
        for rate, a in self.channels:
            drho += rate * (a @ rho @ a.T)
        return rho + (dt / self.system.hbar) * drho

    def run(self, n_steps: int, dt: float, sample_every: int = 1) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Returns:
            (times, hydrogen-bond distributions per sample, final rho)
        """
        u = self.propagator(dt)
        rho = self.initial_state()
        bonds = self.space.bond_counts()
        times, dists = [0.0], [self.distribution(rho, bonds)]
        for k in range(1, n_steps + 1):
            rho = self.step(rho, u, dt)
            if k % sample_every == 0 or k == n_steps:
                times.append(k * dt)
                dists.append(self.distribution(rho, bonds))
        return np.array(times), np.vstack(dists), rho

    def distribution(self, rho: np.ndarray, bonds: np.ndarray) -> np.ndarray:
        return np.bincount(bonds, weights=np.diag(rho).real, minlength=self.space.m + 1)
