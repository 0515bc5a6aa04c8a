"""CHSH analysis of a 4x4 coincidence table, then a simulated run."""
import numpy as np

from ultrafranson import bell_from_table
from ultrafranson.config import load_config
from ultrafranson.detector import bell_experiment
from ultrafranson.reference import bundled

table = np.loadtxt(bundled("table2_counts.csv"), delimiter=",", skiprows=1, usecols=range(1, 5))
res = bell_from_table(table)
print("correlators " + " ".join(f"{e:+.4f}" for e in res.correlators))
print(f"S = {res.S:.4f} +- {res.sigma_S:.4f}  ({res.violation_sigmas:.1f} sigma above 2)")

cfg = load_config(bundled("bell.cfg"))
angles = [cfg.get("bell", k) for k in ("a", "a_prime", "b", "b_prime")]
sim_table = bell_experiment(cfg.state(), *cfg.delays(), *angles,
                            cfg.count_model(dwell_section="bell"), cfg.response(),
                            dwell=cfg.get("bell", "dwell"))
print("simulated counts (rows idler, cols signal)")
print(sim_table.counts)
sim = bell_from_table(sim_table.counts)
print(f"simulated S = {sim.S:.4f} +- {sim.sigma_S:.4f}")
