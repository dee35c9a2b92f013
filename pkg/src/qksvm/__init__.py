"""Quantum-kernel SVM toolkit.

Statevector simulation of a data-encoding feature map, exact and
shot-sampled quantum kernel Gram matrices, classical benchmark kernels,
SMO training on precomputed Grams, PCA + rescaling preprocessing and
ROC/AUC evaluation, orchestrated by the ``qksvm`` CLI.
"""

from ._backend import active_backend

__version__ = "0.1.0"

__all__ = ["active_backend", "__version__"]
