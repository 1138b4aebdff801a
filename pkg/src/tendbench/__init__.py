"""tendbench: desk-scale workbench for a two-phase robot tending skill.

Gross motion is taught by visual-servoing demonstration, fine contact-rich
insertion is handled by a region-gated learned force policy, and both run on
a deterministic quasi-static contact simulator with baselines and an
evaluation harness.
"""

__version__ = "0.1.0"
