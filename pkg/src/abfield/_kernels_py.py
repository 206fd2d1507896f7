"""Pure-numpy reference kernels (fallback when the compiled core is absent).

Contracts
---------
step_complex(prev, cur, out, ux, uy, mask, gamma, inv_h2, dt, m2, periodic)
    One leapfrog step of the gauged Klein-Gordon field.  ``ux[i, j]`` /
    ``uy[i, j]`` are the forward-hop gauge phases exp(-i e int A.dl) on the
    lattice edges (i,j)->(i+1,j) and (i,j)->(i,j+1); with ``periodic`` the
    last column/row links wrap around.  ``mask`` is 1 on evolving sites, 0 on
    Dirichlet sites; ``gamma`` is the sponge damping rate.

step_real(prev, cur, out, veff, mask, gamma, inv_h2, dt, periodic)
    Same scheme for a real field with a site-local squared-mass term ``veff``.

Both write the new time level into ``out`` and return None.
"""

import numpy as np


def _leap(prev, cur, lap, local_m2, gamma, dt, out):
    g = gamma * dt
    np.copyto(out, ((2.0 - dt * dt * local_m2) * cur + dt * dt * lap
                    - (1.0 - g) * prev) / (1.0 + g))


def step_complex(prev, cur, out, ux, uy, mask, gamma, inv_h2, dt, m2, periodic):
    if periodic:
        lap = (ux * np.roll(cur, -1, axis=0)
               + np.roll(ux.conj() * cur, 1, axis=0)
               + uy * np.roll(cur, -1, axis=1)
               + np.roll(uy.conj() * cur, 1, axis=1)
               - 4.0 * cur) * inv_h2
        _leap(prev, cur, lap, m2, gamma, dt, out)
    else:
        out[0, :] = out[-1, :] = 0.0
        out[:, 0] = out[:, -1] = 0.0
        c = cur[1:-1, 1:-1]
        lap = (ux[1:-1, 1:-1] * cur[2:, 1:-1]
               + ux[:-2, 1:-1].conj() * cur[:-2, 1:-1]
               + uy[1:-1, 1:-1] * cur[1:-1, 2:]
               + uy[1:-1, :-2].conj() * cur[1:-1, :-2]
               - 4.0 * c) * inv_h2
        _leap(prev[1:-1, 1:-1], c, lap, m2, gamma[1:-1, 1:-1], dt,
              out[1:-1, 1:-1])
    out *= mask


def step_real(prev, cur, out, veff, mask, gamma, inv_h2, dt, periodic):
    if periodic:
        lap = (np.roll(cur, -1, axis=0) + np.roll(cur, 1, axis=0)
               + np.roll(cur, -1, axis=1) + np.roll(cur, 1, axis=1)
               - 4.0 * cur) * inv_h2
        _leap(prev, cur, lap, veff, gamma, dt, out)
    else:
        out[0, :] = out[-1, :] = 0.0
        out[:, 0] = out[:, -1] = 0.0
        c = cur[1:-1, 1:-1]
        lap = (cur[2:, 1:-1] + cur[:-2, 1:-1] + cur[1:-1, 2:] + cur[1:-1, :-2]
               - 4.0 * c) * inv_h2
        _leap(prev[1:-1, 1:-1], c, lap, veff[1:-1, 1:-1], gamma[1:-1, 1:-1],
              dt, out[1:-1, 1:-1])
    out *= mask
