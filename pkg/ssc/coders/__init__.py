# Sparse self-expression coders
from ssc.coders.omp import OmpParams, omp_sparse_code
from ssc.coders.rcomp import (
    ConnectionLedger,
    ControlState,
    RcompParams,
    apply_mask,
    rcomp_select_first,
    rcomp_sparse_code,
)
from ssc.coders.utils import CoefficientMatrix, PointCode, pursue, select_neighbor
