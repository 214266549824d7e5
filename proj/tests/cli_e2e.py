#!/usr/bin/env python3
# Copyright (C) 2026 The redload Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""End-to-end run of the redload command line."""

import json
import pathlib
import subprocess
import sys
import tempfile

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def call(*args):
    return subprocess.run(args, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                          text=True)


def counters_of(profile):
    out = []
    for section in ("temporal",):
        for p in profile[section]["pairs"]:
            out.append(p["counters"])
    for o in profile["spatial"]["objects"]:
        out.append(o["counters"])
        out.extend(p["counters"] for p in o["pairs"])
    return out


def main():
    redload = sys.argv[1]
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        t, p, m = tmp / "t.lrt", tmp / "p.json", tmp / "m.json"

        r = call(redload, "gen", "--scenario", "adjacent_equal", "-o", str(t))
        check(r.returncode == 0 and t.stat().st_size > 0, "gen writes a trace")
        r = call(redload, "analyze", str(t), "-o", str(p), "--no-sampling")
        check(r.returncode == 0, "analyze --no-sampling succeeds")
        r = call(redload, "report", str(p), "--top", "5")
        check(r.returncode == 0 and "object: A" in r.stdout,
              "report --top 5 names object A")
        check("66.6667%" in r.stdout, "report shows instance percentage")

        prof = json.loads(p.read_text())
        check(prof["spatial"]["objects"][0]["counters"]["redundant_instances"] == 2,
              "adjacent_equal has 2 spatially redundant loads")

        r = call(redload, "report", str(p), "--top", "0")
        check(r.returncode == 0 and "R_prog" in r.stdout and "#1" not in r.stdout,
              "report --top 0 prints only the header")

        r = call(redload, "report", str(p), "--format", "json", "--top", "1")
        rep = json.loads(r.stdout)
        check(r.returncode == 0 and rep["spatial"][0]["object"] == "A",
              "json report lists object A")

        r = call(redload, "merge", str(p), str(p), "-o", str(m))
        merged = json.loads(m.read_text())
        doubled = all(
            {k: 2 * v for k, v in a.items()} == b
            for a, b in zip(counters_of(prof), counters_of(merged)))
        check(r.returncode == 0 and doubled and merged["threads"] == 2,
              "merge with self doubles every counter")

        r = call(redload, "analyze", str(tmp / "missing.lrt"), "-o", str(p))
        check(r.returncode != 0 and "missing.lrt" in r.stderr,
              "analyze of a missing file fails naming it")

        bad = tmp / "bad.lrt"
        bad.write_bytes(t.read_bytes()[:40])
        r = call(redload, "analyze", str(bad), "-o", str(p))
        check(r.returncode != 0 and "bad.lrt" in r.stderr,
              "analyze of a truncated trace fails naming it")

        r = call(redload, "frobnicate")
        check(r.returncode == 2 and "Usage" in r.stderr,
              "unknown subcommand exits 2 with usage")
        r = call(redload, "report", str(p), "--colour")
        check(r.returncode == 2 and "Usage" in r.stderr,
              "unknown flag exits 2 with usage")
        r = call(redload, "report", str(p), "--format", "xml")
        check(r.returncode == 2, "unknown report format exits 2")
        r = call(redload, "analyze", str(t), "-o", str(p), "--no-sampling",
                 "--window-enable", "5")
        check(r.returncode == 2, "--no-sampling conflicts with window flags")
        r = call(redload, "gen", "--scenario", "nope", "-o", str(t))
        check(r.returncode == 2, "unknown scenario exits 2")
        r = call(redload, "gen", "--scenario", "stencil", "--param", "nx=abc",
                 "-o", str(t))
        check(r.returncode == 1 and "nx" in r.stderr,
              "invalid scenario parameter is reported")
        r = call(redload, "report", str(tmp / "none.json"))
        check(r.returncode != 0 and "none.json" in r.stderr,
              "report of a missing profile names it")

        tt = tmp / "t.txt"
        r = call(redload, "gen", "--scenario", "forward_copy", "--param", "len=8",
                 "--param", "reps=1", "--text", "-o", str(tt))
        check(r.returncode == 0 and tt.read_text().startswith("LRT1 text 1"),
              "gen --text writes the text encoding")
        r = call(redload, "analyze", str(tt), "-o", str(p), "--window-enable",
                 "1000", "--window-disable", "99000", "--scope-budget", "2",
                 "--approx-epsilon", "0.001")
        check(r.returncode == 0, "analyze accepts sampling and tuning flags")

    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
