# Automation Package