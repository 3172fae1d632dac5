"""Cross-verification toolkit for a synthesizable Verilog subset.

The package is organized along the processing pipeline:

- ``rtlcross.vl``: lexer, parser, AST, and subset validation
- ``rtlcross.ir``: lowering to a width-resolved IR and combinational ordering
- ``rtlcross.sim``: cycle-accurate interpretation of the IR
- ``rtlcross.emit``: deterministic Python reference-model / skeleton emission
- ``rtlcross.verify``: stimulus generation, dual-sided execution, trace diffing
- ``rtlcross.rewards``: tiered reward ladder, pass@k, RL-set curation
- ``rtlcross.orchestrate``: multi-turn agent sessions with backtracking and
  cross-paired group sampling
- ``rtlcross.corpus``: batch conversion of Verilog corpora into verified
  (design, reference model) records with contamination filtering
"""

__version__ = "0.1.0"

from rtlcross.diag import Diagnostic, SourceUnit

__all__ = ["Diagnostic", "SourceUnit", "__version__"]
