"""Vital node identification in complex networks.

The toolkit ranks nodes by how much their removal fragments a network or
how far an epidemic seeded at them spreads. It implements the GNNE
ranking (GCN feature extraction, GAT influence factors, per-node entropy)
alongside classical centralities, a discrete-time SIR simulator, and an
attack-and-spreading evaluation harness, all behind one CLI.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
