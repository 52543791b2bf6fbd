"""Report assembly: check records, convention headers, JSON rendering.

Reports are plain dicts rendered with sorted keys and fixed float
formatting, so a fixed seed and config produce byte-identical output.
Timing never enters the report body; the CLI routes it to stderr.
"""

import json

SCHEMA_VERSION = 1

CONVENTIONS = {
    "axis_order": "base axes first, then the fibre blocks in order; "
                  "axis index = block*n + i",
    "sign": "forms and contractions follow the ascending axis order; "
            "fibre integration contracts the fibre tangent into the "
            "first slot",
    "monodromy": "angles are the real-part translations of the gluing, "
                 "reported mod 1 ('re' convention)",
    "area_normalization": "complexified areas keep the bare convention; "
                          "multiply by 2*pi to compare with the scaled one",
}


def check(check_id, anchor, residual, threshold):
    residual = float(residual)
    threshold = float(threshold)
    return {
        "id": check_id,
        "anchor": anchor,
        "residual": residual,
        "threshold": threshold,
        "verdict": "PASS" if residual < threshold else "FAIL",
    }


def make_report(suite, config, checks, data=None):
    report = {
        "suite": suite,
        "schema_version": SCHEMA_VERSION,
        "conventions": CONVENTIONS,
        "config": config,
        "checks": checks,
        "pass": all(c["verdict"] == "PASS" for c in checks),
    }
    if data is not None:
        report["data"] = data
    return report


def render(report):
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False)


def complex_str(z):
    z = complex(z)
    return f"{z.real:.12g}{z.imag:+.12g}i"
