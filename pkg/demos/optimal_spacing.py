"""Choosing the arrival spacing, and splitting one server into n slow ones.

The cost (1-c) E[idle] + c E[wait] trades idleness against waiting; its
minimizer has a closed form through the lower real Lambert branch.
"""
import numpy as np

from dm1queue import QueueParams
from dm1queue.control import CostSpec, cost, golden_section, optimal_a
from dm1queue.multiserver import slow_server_table

mu = 3.0
print(" c      a*          zeta0*      C(a*)       golden section")
for c in (0.2, 0.5, 0.8):
    spec = CostSpec(c, mu)
    r = optimal_a(spec)
    gs = golden_section(lambda a: cost(a, spec), 1 / mu + 1e-4, 5.0)
    print(f"{c:.1f}  {r.a_opt:.8f}  {r.zeta0_opt:.8f}  {r.cost_value:.8f}  {gs:.8f}")

spec = CostSpec(0.5, mu)
grid = np.linspace(0.36, 1.2, 8)
print("cost curve, c = 1/2:", np.round([cost(a, spec) for a in grid], 5))

# n servers of rate mu/n: the mean wait falls and P(no wait) rises with n
params = QueueParams(2.0, 3.0)
print(" n   m_n          p_n")
for row in slow_server_table(6, params):
    print(f"{row.n:2d}  {row.m_n:.8f}  {row.p_n:.8f}")
