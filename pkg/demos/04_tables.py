"""Print the energy, complexity and data-rate tables, plus one custom row each."""
from cimris import tables

extra = tables.all_tables(energy=tables.ENERGY_ROWS + ((16, 4, 2, 64),),
                          complexity=tables.COMPLEXITY_ROWS + ((64, 16, 64, 128, 64),),
                          rate=tables.RATE_ROWS + ((16, 64, 64),))
for t in extra.values():
    print(t.to_text())
