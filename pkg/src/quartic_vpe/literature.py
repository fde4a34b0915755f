"""Published reference values for the quartic-oscillator free energy.

Two benchmark tables from the published literature, quoted verbatim at
their original printed precision.  They are data, not computations:
comparison code must distinguish what this package computes from what
the literature quotes, so these constants live in their own module and
keep their printed textual form (the number of printed digits defines
the comparison unit "one unit in the last printed place").

Column notes:

* ``f_accu`` (first table) is an independently published high-precision
  free energy for the same Hamiltonian, quoted to 12 digits;
* ``f1_cumulant``/``f3_cumulant`` (second table) are first- and
  third-order results of a published cumulant-expansion method, included
  for context only;
* ``f_exact`` (second table) is the published numerically exact value.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "Quoted",
    "Table1Row",
    "Table2Row",
    "TABLE1",
    "TABLE1_Z",
    "TABLE2",
]


@dataclass(frozen=True)
class Quoted:
    """A literature value kept in its printed form."""

    text: str

    @property
    def value(self) -> float:
        return float(self.text)

    @property
    def last_unit(self) -> float:
        """Size of one unit in the last printed decimal place."""
        mantissa = self.text.strip().lstrip("+-")
        if "." not in mantissa:
            return 1.0
        return 10.0 ** -len(mantissa.split(".")[1])


@dataclass(frozen=True)
class Table1Row:
    """Dimensionless strong-coupling scan at z = 10."""

    t_reduced: float
    f0: Quoted
    f2: Quoted
    f3: Quoted
    f4: Quoted
    f_accu: Quoted


@dataclass(frozen=True)
class Table2Row:
    """Fixed m = omega = 1 scan over coupling and inverse temperature."""

    lam: float
    beta: float
    f0: Quoted
    f1_cumulant: Quoted
    f2: Quoted
    f3: Quoted
    f3_cumulant: Quoted
    f_exact: Quoted


TABLE1_Z = 10.0

TABLE1: tuple[Table1Row, ...] = (
    Table1Row(1.0, Quoted("2.262452"), Quoted("2.2622504"), Quoted("2.262261"),
              Quoted("2.262259"), Quoted("2.26225951564")),
    Table1Row(2.0, Quoted("2.064409"), Quoted("2.0638734"), Quoted("2.063925"),
              Quoted("2.063913"), Quoted("2.06391575514")),
    Table1Row(3.0, Quoted("1.556991"), Quoted("1.5555342"), Quoted("1.555747"),
              Quoted("1.555676"), Quoted("1.55569718863")),
    Table1Row(4.0, Quoted("0.7836171"), Quoted("0.7805129"), Quoted("0.7811028"),
              Quoted("0.7808495"), Quoted("0.780936961496")),
    Table1Row(5.0, Quoted("-0.2050294"), Quoted("-0.210593"), Quoted("-0.2093154"),
              Quoted("-0.2099735"), Quoted("-0.209722583045")),
    Table1Row(10.0, Quoted("-7.348171"), Quoted("-7.3793287"), Quoted("-7.367283"),
              Quoted("-7.37775"), Quoted("-7.37249823358")),
    Table1Row(20.0, Quoted("-27.86147"), Quoted("-28.0074342"), Quoted("-27.92105"),
              Quoted("-28.03925"), Quoted("-27.9670036469")),
    Table1Row(30.0, Quoted("-52.99767"), Quoted("-53.3278138"), Quoted("-53.08786"),
              Quoted("-53.50769"), Quoted("-53.2269143165")),
)

TABLE2: tuple[Table2Row, ...] = (
    Table2Row(1.0, 5.0, Quoted("0.812491"), Quoted("0.81188"), Quoted("0.800767"),
              Quoted("0.807364"), Quoted("0.803882"), Quoted("0.803758")),
    Table2Row(5.0, 5.0, Quoted("1.244312"), Quoted("1.24353"), Quoted("1.216996"),
              Quoted("1.2355"), Quoted("1.22494"), Quoted("1.22459")),
    Table2Row(50.0, 5.0, Quoted("2.54758"), Quoted("2.54675"), Quoted("2.480384"),
              Quoted("2.529673"), Quoted("2.50067"), Quoted("2.49971")),
    Table2Row(500.0, 10.0, Quoted("5.425756"), Quoted("5.42536"), Quoted("5.276719"),
              Quoted("5.387961"), Quoted("5.32211"), Quoted("5.3199")),
    Table2Row(20000.0, 3.0, Quoted("18.50166"), Quoted("18.5003"), Quoted("17.98822"),
              Quoted("18.37314"), Quoted("18.1449"), Quoted("18.137")),
)
