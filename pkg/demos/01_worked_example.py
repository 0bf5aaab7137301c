"""Two chained rules, X1 | X2 -> X3 and X3 | X4 -> X5.

Observing X3 = 0 splits the interaction graph in two, so the conditional of
X5 only needs the {X4, X5} block. The closed form is 2 psi2 / (1 + 2 psi2).
"""

from state_algebra import compile_system, parse_model, query
from state_algebra.oracle import oracle_conditional

MODEL = """
vars X1 X2 X3 X4 X5
rule 0.7 : X1 | X2 -> X3
rule {psi2} : X3 | X4 -> X5
"""

for psi2 in (0.1, 0.5, 0.9):
    rs = parse_model(MODEL.format(psi2=psi2))
    d = compile_system(rs)
    e = rs.evidence({"X3": 0})
    res = query(d, e, rs.index("X5"), "blanket")
    print(f"psi2={psi2}:  engine {res.probability:.12g}  closed form {2 * psi2 / (1 + 2 * psi2):.12g}"
          f"  oracle {oracle_conditional(rs, {2: 0}, 4):.12g}")
    print(f"    blanket {[rs.variables[i] for i in res.diagnostics['blanket']]}"
          f"  component sizes {res.diagnostics['component_sizes']}")

print("\nCompiled form of the psi2 = 0.9 model (base row first):")
print(compile_system(parse_model(MODEL.format(psi2=0.9))))
