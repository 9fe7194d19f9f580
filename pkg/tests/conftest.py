import degenwave

# the library class is named like a pytest collectable; it is not one
degenwave.TestBump.__test__ = False
