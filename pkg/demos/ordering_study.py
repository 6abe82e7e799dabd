# Compare variable-ordering strategies on the shipped models.  For each
# strategy we report the weighted event span of the order it produces and
# the BDD operation count of a full synthesis run under that order; lower
# is better for both, and the two usually move together.
# Example usage: python demos/ordering_study.py

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from efasynth.parser import parse_file
from efasynth.synthesis import SynthesisConfig, synthesize
from efasynth.transform import linearize, plantify
from efasynth.varorder import compute_order, hyperedges, wes

STRATEGIES = ["model", "force", "cm", "sloan", "dcsh", "pipeline-v08", "pipeline-v40"]


def main():
    models = pathlib.Path(__file__).resolve().parent.parent / "models"
    for path in sorted(models.glob("*.efa")):
        if path.name.endswith(".sup.efa"):
            continue
        model, diags = linearize(plantify(parse_file(path)))
        assert not diags
        edges = hyperedges(model)
        print(f"== {path.name} ({len(model.variables)} variables) ==")
        print(f"{'strategy':<14}{'wes':>8}{'operations':>12}{'peak nodes':>12}")
        for strategy in STRATEGIES:
            order = compute_order(model, strategy)
            config = SynthesisConfig.preset("v40")
            config.order = strategy
            result = synthesize(model, config)
            print(f"{strategy:<14}{wes(order, edges):>8.3f}"
                  f"{result.metrics['operations']:>12}"
                  f"{result.metrics['peak_nodes']:>12}")
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
