from treealg.axioms.data import Decomposition, Module, PreTreeAlgebraData, TreeFunctorData
from treealg.axioms.iso import gauge_tree_functor, mutations, scalar_gauges, verify_iso
from treealg.axioms.pretree import verify_pretree
from treealg.axioms.pta import verify_pta
from treealg.axioms.rationality import inexact_coefficients, verify_rationality
from treealg.axioms.report import Report
from treealg.axioms.treefunctor import verify_treefunctor
