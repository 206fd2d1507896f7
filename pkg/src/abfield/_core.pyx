# cython: boundscheck=False, wraparound=False, cdivision=True
"""Leapfrog stencil kernels (compiled hot path).

Same contracts as abfield._kernels_py; see that module for the reference
implementation.  Link arrays ux/uy hold the forward-hop gauge phases
exp(-i e int A.dl) for the +x and +y lattice edges.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def step_complex(cnp.complex128_t[:, ::1] prev,
                 cnp.complex128_t[:, ::1] cur,
                 cnp.complex128_t[:, ::1] out,
                 cnp.complex128_t[:, ::1] ux,
                 cnp.complex128_t[:, ::1] uy,
                 double[:, ::1] mask,
                 double[:, ::1] gamma,
                 double inv_h2, double dt, double m2,
                 bint periodic):
    cdef Py_ssize_t nx = cur.shape[0]
    cdef Py_ssize_t ny = cur.shape[1]
    cdef Py_ssize_t i, j, ip, im, jp, jm, i0, i1, j0, j1
    cdef double dt2 = dt * dt
    cdef double g
    cdef double complex lap
    if periodic:
        i0 = 0; i1 = nx; j0 = 0; j1 = ny
    else:
        i0 = 1; i1 = nx - 1; j0 = 1; j1 = ny - 1
    with nogil:
        if not periodic:
            for j in range(ny):
                out[0, j] = 0.0
                out[nx - 1, j] = 0.0
            for i in range(nx):
                out[i, 0] = 0.0
                out[i, ny - 1] = 0.0
        for i in range(i0, i1):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            for j in range(j0, j1):
                jp = j + 1 if j + 1 < ny else 0
                jm = j - 1 if j > 0 else ny - 1
                lap = (ux[i, j] * cur[ip, j]
                       + ux[im, j].conjugate() * cur[im, j]
                       + uy[i, j] * cur[i, jp]
                       + uy[i, jm].conjugate() * cur[i, jm]
                       - 4.0 * cur[i, j]) * inv_h2
                g = gamma[i, j] * dt
                out[i, j] = (((2.0 - dt2 * m2) * cur[i, j]
                              + dt2 * lap
                              - (1.0 - g) * prev[i, j]) / (1.0 + g)) * mask[i, j]


def step_real(double[:, ::1] prev,
              double[:, ::1] cur,
              double[:, ::1] out,
              double[:, ::1] veff,
              double[:, ::1] mask,
              double[:, ::1] gamma,
              double inv_h2, double dt,
              bint periodic):
    cdef Py_ssize_t nx = cur.shape[0]
    cdef Py_ssize_t ny = cur.shape[1]
    cdef Py_ssize_t i, j, ip, im, jp, jm, i0, i1, j0, j1
    cdef double dt2 = dt * dt
    cdef double g, lap
    if periodic:
        i0 = 0; i1 = nx; j0 = 0; j1 = ny
    else:
        i0 = 1; i1 = nx - 1; j0 = 1; j1 = ny - 1
    with nogil:
        if not periodic:
            for j in range(ny):
                out[0, j] = 0.0
                out[nx - 1, j] = 0.0
            for i in range(nx):
                out[i, 0] = 0.0
                out[i, ny - 1] = 0.0
        for i in range(i0, i1):
            ip = i + 1 if i + 1 < nx else 0
            im = i - 1 if i > 0 else nx - 1
            for j in range(j0, j1):
                jp = j + 1 if j + 1 < ny else 0
                jm = j - 1 if j > 0 else ny - 1
                lap = (cur[ip, j] + cur[im, j] + cur[i, jp] + cur[i, jm]
                       - 4.0 * cur[i, j]) * inv_h2
                g = gamma[i, j] * dt
                out[i, j] = (((2.0 - dt2 * veff[i, j]) * cur[i, j]
                              + dt2 * lap
                              - (1.0 - g) * prev[i, j]) / (1.0 + g)) * mask[i, j]
