"""Security triage for developer-forum code snippets.

The package covers the full path from a raw Stack Exchange-style post dump
to clone reports over a target source corpus:

- :mod:`snipscan.ingest` parses post dumps and extracts code blocks,
- :mod:`snipscan.resolver` decides which snippets touch security APIs,
- :mod:`snipscan.rules` labels security-related snippets secure/insecure,
- :mod:`snipscan.classifier` scales the labels with a linear SVM,
- :mod:`snipscan.frontend` compiles snippets and corpus sources to an IR,
- :mod:`snipscan.pdg` builds per-method dependence graphs,
- :mod:`snipscan.clones` finds snippet copies inside corpus methods,
- :mod:`snipscan.pipeline` orchestrates the staged batch run.
"""

__version__ = "0.1.0"
