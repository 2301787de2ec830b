"""Top-level prooflist library.  This includes the classes needed to load
rule and label files, search for a certifiably optimal rule list, and check
the answer against exhaustive enumeration on small instances.
"""

__version__ = "0.1.0"

from prooflist.bitvector import BitVector  # noqa: F401,E402
from prooflist.config import Ablation, SolverConfig, load_config  # noqa: F401,E402
from prooflist.dataset import Antecedent, AntecedentSet, LabeledDataset  # noqa: F401,E402
from prooflist.rulelist import RuleList  # noqa: F401,E402
from prooflist.search import SearchPolicy  # noqa: F401,E402
from prooflist.solver import Solver, SolverResult, Status, solve  # noqa: F401,E402
from prooflist.oracle import brute_force  # noqa: F401,E402
from prooflist.errors import ProoflistError  # noqa: F401,E402
