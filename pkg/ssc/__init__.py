# Restricted-connection OMP sparse subspace clustering
from ssc.coders import (
    CoefficientMatrix,
    ConnectionLedger,
    ControlState,
    OmpParams,
    RcompParams,
    omp_sparse_code,
    rcomp_sparse_code,
)
from ssc.dataset import Dataset, SynthConfig, generate_synthetic, load_matrix, pca_project, save_matrix
from ssc.metrics import EvalReport, clustering_accuracy, connectivity, subspace_preserving_rate
from ssc.spectral import AffinityMatrix, build_affinity, spectral_cluster
