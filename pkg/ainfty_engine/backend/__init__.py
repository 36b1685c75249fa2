from .core import Basis, Element, Generator, MultilinearOp, SignRule, compose_insert, evaluate
from .ainfty import CurvedAInfAlgebra, check_relations, check_unit, deform, from_dga, mc_residual
from .modcat import (AInfBimodule, AInfModule, HomComplex, PreModuleHom, bimodule_to_functor,
                     is_representable_on_object, lambda_map, tensor_dg, yoneda_left, yoneda_right)
from .bar import bar_e1, bar_kappa, bar_page
from .mc import solve_bounding_cochain, verify_cyclic
from .homology import ChainMap, FiniteComplex, cohomology, cone, is_quasi_iso, smith_normal_form
from .trees import (BrokenTree, ColoredRootedTree, StratumDescriptor, boundary_map, enumerate_strata, glue,
                    is_admissible)
from .limits import DirectedSystem, direct_limit, verify_system
from .textformat import StructureDocument, parse, serialize
from .store import EngineStore
