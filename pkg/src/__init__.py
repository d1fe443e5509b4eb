# Densitometer - Source Package
