"""A short tour of the row algebra and of exact queries on a small distribution."""

from state_algebra import BinaryStateVector, Distribution, marginalize, partition
from state_algebra.algebra import cardinality, complement, merge_rows, Row
from state_algebra.distribution import project, state_mass, vector_mass

s = BinaryStateVector.of("1 - 0", "0 - 1")
q = BinaryStateVector.of("- 1 -")
print("s      =", s)
print("q      =", q)
print("s q    =", s & q)
print("s + q  =", s | q)
print("s \\ q  =", s - q)
print("not s  =", ~s, f"  (|s| = {cardinality(s)}, |not s| = {cardinality(complement(s))})")

raw = [Row.parse(t) for t in ("100", "101", "110", "111", "000", "001")]
print("\nmerging six digit rows:", [str(r) for r in merge_rows(raw)])

psi = dict(zip("12345", (0.3, 1.7, 0.2, 2.5, 0.9)))
d = Distribution.from_rows(
    [("00-", psi["1"]), ("-11", psi["2"]), ("1-0", psi["3"]), ("010", psi["4"]), ("101", psi["5"])]
)
print("\ndistribution:\n" + str(d))
print("Z          =", partition(d).to_float())
print("mass(1-0 + -01) =", vector_mass(d, BinaryStateVector.of("1-0", "-01")).to_float())

m = marginalize(d, [1, 2])
print("\nmarginal on (X2, X3):")
for text in ("00", "01", "10", "11"):
    print(f"  {text}: {state_mass(m, Row.parse(text)).psi:.6g}")
print("Z of marginal =", partition(m).to_float())

eta = project(d, Row.parse("1--"))
print("\nprojected on X1 = 1:\n" + str(eta))
