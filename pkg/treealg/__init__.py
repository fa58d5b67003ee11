from .ratfield import OneForm, RatFunc
from .cooperad import TruncMatrix, TruncTensor, cocompose, coaugment, counit
from .connalg import Connection, GaugeMap, conn_degree, gauge_transform, is_flat, pushforward_conn
from .liealg import LieAlgebra, Rep, sl2, sl2_rep
from .kzwzw import kz_build, kz_restrict, wzw_algebra, wzw_instance
from .monodromy import Path, circle_loop, monodromy_vs_residue, regularity_probe, transport
