"""Swarm aggregation under a regularized Morse interaction with drag.

No pressure here: particles attract and repel through the gradient of a
Morse potential (tapered to zero at the origin, so self-interaction
vanishes) and lose energy to linear drag.  By T = 100 the cloud has
frozen into an equilibrium; the convergence rate of the particle
solutions again lands on -1/2.

The drag is built into the integrator's half-kicks in closed form, so
even the stiff eta = 10 case is stable at dt = 0.01.

Run:  python demos/04_morse_aggregation.py      (a couple of minutes)
"""

import numpy as np

from sphwass import ExperimentPlan, MorseInteraction, run_convergence_study

interaction = MorseInteraction()  # c_a=2, c_r=1.5, l_a=1, l_r=2, r_cut=0.1
print(
    "interaction: |K| bounded by %.3f, force at r=3 has magnitude %.5f"
    % (interaction.sup_norm(), np.linalg.norm(interaction.force(np.array([3.0, 0.0]))))
)

for eta in (10.0, 0.1):
    plan = ExperimentPlan(
        family="morse_2d",
        resolutions=(1, 2, 3, 4),
        eta=eta,
        dt=1e-2,
        t_end=100.0,
        n_snapshots=10,
        morse=interaction,
    )
    result = run_convergence_study(plan)
    vmax = max(rec.final_max_speed for rec in result.runs)
    print("\neta = %g:" % eta)
    print("  terminal max particle speed: %.2e  (equilibrium reached)" % vmax)
    table = result.rate_table
    for p, (k_lo, k_hi) in enumerate(zip(table.resolutions, table.resolutions[1:])):
        print("  W_%d,%d = %.6e" % (k_lo, k_hi, result.sup_distances[p]))
    for label, rate in zip(table.rate_labels, table.rates):
        print("  C2_%d = %+.4f   (theory: -0.5)" % (label, rate))
    final = result.runs[-1].trajectory.states[-1]
    ext = final.positions.max(axis=0) - final.positions.min(axis=0)
    print("  final cloud extent: %.4f x %.4f" % (ext[0], ext[1]))
