"""hbqed - open-system dynamics of hydrogen-bonded [(H2O)2]^m clusters."""
