"""X-structured two-qubit density matrices.

Decoupled basis ``|1> = |gg>, |2> = |eg>, |3> = |ge>, |4> = |ee>`` (first
label is qubit 1). Coupled basis ``|G> = |1>, |A> = (|2> - |3>)/sqrt2,
|S> = (|2> + |3>)/sqrt2, |E> = |4>``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

X_MASK = np.array([
    [1, 0, 0, 1],
    [0, 1, 1, 0],
    [0, 1, 1, 0],
    [1, 0, 0, 1],
], dtype=bool)


class InvalidState(ValueError):
    pass


@dataclass(frozen=True)
class XState:
    p1: float
    p2: float
    p3: float
    p4: float
    rho23: complex = 0j
    rho14: complex = 0j

    # -- constructors --------------------------------------------------------
    @classmethod
    def ground(cls):
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def antisymmetric(cls):
        return cls(0.0, 0.5, 0.5, 0.0, -0.5)

    @classmethod
    def symmetric(cls):
        return cls(0.0, 0.5, 0.5, 0.0, 0.5)

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(*(float(x) for x in v[:4]), complex(v[4], v[5]), complex(v[6], v[7]))

    @classmethod
    def from_matrix(cls, m, atol=1e-10):
        m = np.asarray(m)
        if np.max(np.abs(m[~X_MASK]), initial=0.0) > atol:
            raise InvalidState("matrix is not X-structured")
        return cls(*(float(m[i, i].real) for i in range(4)), complex(m[1, 2]), complex(m[0, 3]))

    @classmethod
    def from_coupled(cls, g, a, s, e, as_=0j, rho14=0j):
        """Build from coupled-basis populations and the A-S coherence <A|rho|S>."""
        # rho_2 + rho_3 = a + s, Re rho23 = (s - a)/2, rho22 - rho33 = 2 Re rho_AS,
        # Im rho23 = Im rho_AS
        as_ = complex(as_)
        p2 = 0.5 * (a + s) + as_.real
        p3 = 0.5 * (a + s) - as_.real
        return cls(g, p2, p3, e, complex(0.5 * (s - a), as_.imag), rho14)

    # -- views ---------------------------------------------------------------
    def vector(self):
        """(p1, p2, p3, p4, Re rho23, Im rho23, Re rho14, Im rho14)."""
        return np.array([self.p1, self.p2, self.p3, self.p4,
                         self.rho23.real, self.rho23.imag, self.rho14.real, self.rho14.imag])

    def matrix(self):
        m = np.diag([self.p1, self.p2, self.p3, self.p4]).astype(complex)
        m[1, 2], m[2, 1] = self.rho23, np.conj(self.rho23)
        m[0, 3], m[3, 0] = self.rho14, np.conj(self.rho14)
        return m

    @property
    def trace(self):
        return self.p1 + self.p2 + self.p3 + self.p4

    def coupled(self):
        """Coupled-basis populations and coherence as a dict (G, A, S, E, AS)."""
        mid = 0.5 * (self.p2 + self.p3)
        return {
            "G": self.p1,
            "A": mid - self.rho23.real,
            "S": mid + self.rho23.real,
            "E": self.p4,
            "AS": complex(0.5 * (self.p2 - self.p3), self.rho23.imag),
        }

    def validate(self, atol=1e-10):
        if abs(self.trace - 1) > atol:
            raise InvalidState(f"trace {self.trace!r} != 1")
        if min(self.p1, self.p2, self.p3, self.p4) < -atol:
            raise InvalidState("negative population")
        if abs(self.rho23) ** 2 > self.p2 * self.p3 + atol:
            raise InvalidState("|rho23|^2 > rho22 rho33")
        if abs(self.rho14) ** 2 > self.p1 * self.p4 + atol:
            raise InvalidState("|rho14|^2 > rho11 rho44")
        return self
