"""Default settings as module-level attributes, overridable through
environment variables.
"""

import os

seed = int(os.environ.get("DUNNETTCTP_SEED", "20210917"))
"""Master seed for every random stream (QMC randomizations and
simulated data).
"""

accuracy = float(os.environ.get("DUNNETTCTP_ACCURACY", "1e-4"))
"""Target absolute error of multivariate t probabilities in analyses."""

simulation_accuracy = float(os.environ.get("DUNNETTCTP_SIM_ACCURACY", "1e-3"))
"""Target absolute error of multivariate t probabilities inside simulation
runs, where only the decision at ``alpha`` is recorded.
"""

threads = int(os.environ.get("DUNNETTCTP_THREADS", "1"))
"""Default number of workers for closure nodes and simulation runs."""

max_groups = int(os.environ.get("DUNNETTCTP_MAX_GROUPS", "20"))
"""Largest number of treatments ``k`` for which the closure is
enumerated.
"""
