#!/usr/bin/env python3
"""Independent numpy reference for heat config 1, FE/BE pair, dt = 1/100.

Writes max|BE - FE| per step, FE taken from the BE trajectory (open loop).
Dense linear solves, so the tridiagonal solver is not shared with the C++ code.
"""
import sys

import numpy as np

k, dx, dt, t_end = 1.0 / 100, 1.0 / 100, 1.0 / 100, 2.0
m = round(1.0 / dx) - 1
n = round(t_end / dt)
x = dx * np.arange(1, m + 1)
r = k * dt / dx**2

lap = -2.0 * np.eye(m) + np.eye(m, k=1) + np.eye(m, k=-1)
implicit = np.eye(m) - r * lap


def q(t):
    return x * np.exp(-t / 2.0)


u = 4.0 * x * (x - 1.0) * (x - 2.0)
out = sys.stdout if len(sys.argv) < 2 else open(sys.argv[1], "w")
out.write("# heat config 1, fe-be, dt=1/100: max-norm difference per step\n")
for step in range(1, n + 1):
    t_prev, t_next = (step - 1) * dt, step * dt
    fe = u + r * (lap @ u) + dt * q(t_prev)
    be = np.linalg.solve(implicit, u + dt * q(t_next))
    out.write(f"{np.max(np.abs(be - fe)):.17g}\n")
    u = be
