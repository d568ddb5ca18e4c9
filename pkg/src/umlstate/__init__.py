"""UMLState verification toolchain.

Pipeline: parse a UMLState machine, validate and complete it, characterize
its model class as one hybrid-logic sentence, translate that into a
first-order theory with proof obligations, emit CASL-style or TPTP text,
and drive an external prover.  A bounded explicit-state oracle checks every
stage against the semantics directly.
"""

__version__ = "0.1.0"
