"""Extended tanh method for u_t + ωu_xxxxx + αuu_xxx + βu_xu_xx + γu²u_x = 0"""
