"""Figure rendering for simulator outputs.

Reads only the documented external contracts of the simulator: run CSVs
with header ``t,E,E2,diss_measured,diss_predicted,K,K1,K2,K3,K4``, fit
reports and sweep aggregates in JSON.  No simulator internals are
imported, so the plotting layer can be installed (or absent) on its own.
"""

from .render import PlotJob, render

__version__ = "0.1.0"
__all__ = ["PlotJob", "render"]
