"""Quaternion algebra and the Hopf maps that turn model-space points into edges.

Quaternions are stored as ``(w, x, y, z)``, the coefficients of ``1, i, j, k``.
All array functions accept any leading batch shape and operate on the last
axis, so a whole polygon (or a batch of polygons) is mapped in one call.

Three-vectors are read as imaginary quaternions and returned in
``(i, j, k)`` order.
"""

from typing import NamedTuple

import numpy as np

__all__ = [
    "Quaternion",
    "quat_mul",
    "quat_conj",
    "norm_sq",
    "hopf",
    "hopf_complex",
    "hopf_planar",
    "frame_hopf",
    "to_complex_pair",
    "from_complex_pair",
]


class Quaternion(NamedTuple):
    w: float
    x: float
    y: float
    z: float

    def __mul__(self, other):
        return Quaternion(*quat_mul(self, other).tolist())

    def conj(self):
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self):
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    @classmethod
    def from_vector(cls, v):
        """The imaginary quaternion ``v[0] i + v[1] j + v[2] k``."""
        return cls(0.0, float(v[0]), float(v[1]), float(v[2]))


def _split(q):
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != 4:
        raise ValueError(f"expected quaternions on the last axis, got shape {q.shape}")
    return q[..., 0], q[..., 1], q[..., 2], q[..., 3]


def quat_mul(p, q):
    """Hamilton product ``p q`` (``ij = k``, ``ji = -k``)."""
    pw, px, py, pz = _split(p)
    qw, qx, qy, qz = _split(q)
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def quat_conj(q):
    w, x, y, z = _split(q)
    return np.stack([w, -x, -y, -z], axis=-1)


def norm_sq(q):
    w, x, y, z = _split(q)
    return w * w + x * x + y * y + z * z


def hopf(q):
    """Standard Hopf map ``q -> conj(q) i q`` as a 3-vector.

    The output norm equals ``norm_sq(q)``, so a point of norm squared ``r``
    becomes an edge of length ``r``.
    """
    w, x, y, z = _split(q)
    return np.stack(
        [w * w + x * x - y * y - z * z, 2.0 * (x * y - w * z), 2.0 * (w * y + x * z)],
        axis=-1,
    )


def hopf_complex(a, b):
    """Hopf map of the quaternion ``a + b j`` given as two complex numbers.

    Returns ``(|a|^2 - |b|^2, 2 Im(a conj(b)), 2 Re(a conj(b)))``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ab = a * np.conj(b)
    return np.stack(
        [a.real * a.real + a.imag * a.imag - b.real * b.real - b.imag * b.imag,
         2.0 * ab.imag, 2.0 * ab.real],
        axis=-1,
    )


def hopf_planar(a, b):
    """Hopf map restricted to real ``a + b j``; lands in the ``i, k`` plane.

    Returns the ``(i, k)`` coordinates ``(a^2 - b^2, 2ab)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.stack([a * a - b * b, 2.0 * a * b], axis=-1)


def frame_hopf(q):
    """The frame ``(conj(q) i q, conj(q) j q, conj(q) k q)`` as matrix columns.

    For a unit quaternion this is a rotation matrix, and ``frame_hopf(p) @ v``
    equals ``conj(p) v p`` for an imaginary quaternion ``v``. ``q`` and ``-q``
    give the same matrix.
    """
    w, x, y, z = _split(q)
    ww, xx, yy, zz = w * w, x * x, y * y, z * z
    m = np.empty(np.shape(w) + (3, 3))
    m[..., 0, 0] = ww + xx - yy - zz
    m[..., 1, 0] = 2.0 * (x * y - w * z)
    m[..., 2, 0] = 2.0 * (w * y + x * z)
    m[..., 0, 1] = 2.0 * (x * y + w * z)
    m[..., 1, 1] = ww - xx + yy - zz
    m[..., 2, 1] = 2.0 * (y * z - w * x)
    m[..., 0, 2] = 2.0 * (x * z - w * y)
    m[..., 1, 2] = 2.0 * (w * x + y * z)
    m[..., 2, 2] = ww - xx - yy + zz
    return m


def to_complex_pair(q):
    """Split ``q = a + b j`` into ``a = w + x i`` and ``b = y + z i``."""
    w, x, y, z = _split(q)
    return w + 1j * x, y + 1j * z


def from_complex_pair(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.stack([a.real, a.imag, b.real, b.imag], axis=-1)
