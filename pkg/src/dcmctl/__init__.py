"""Demand-charge management controller and plant simulator.

Subpackages:
    plant      - discrete-time battery/grid/load simulation
    protocols  - PZEM-016 Modbus-RTU and BMS CAN frame codecs
    control    - relay decision logic, sequencing, and the control loop
    telemetry  - topic contract, payload schemas, message bus, WS bridge
    tariff     - TOU tariffs, demand charges, arbitrage day simulation
"""

__version__ = "0.1.0"
